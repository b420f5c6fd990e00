use sc2wm_obs::{serialize_observation, TimedAction};

use crate::window::DynamicsSample;

/// The dynamics-prediction prompt template. Placeholders: `{player_id}`,
/// `{delta}`, `{start_obs}`, `{action_section}`.
pub const WORLD_MODEL_TEMPLATE: &str = include_str!("../templates/world_model.txt");

/// Marker rendered when a window contains no actions.
pub const EMPTY_ACTION_MARKER: &str = "(none)";

#[derive(Debug, Clone)]
pub struct RenderConfig {
    /// Append `/no_think` to the user turn and prefix the assistant turn
    /// with an empty think block, matching the training data.
    pub no_think: bool,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig { no_think: true }
    }
}

/// Action lines joined one per line, or the explicit empty marker.
pub fn render_action_section(actions: &[TimedAction]) -> String {
    if actions.is_empty() {
        return EMPTY_ACTION_MARKER.to_string();
    }
    actions.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("\n")
}

/// Renders one sample into its (user, assistant) message pair.
///
/// The user text is the template with the four placeholders substituted and
/// nothing else altered; the assistant text is the serialized target
/// observation. Both are byte-exact against golden files in tests.
pub fn render_world_model_prompt(
    sample: &DynamicsSample,
    player_id: u32,
    cfg: &RenderConfig,
) -> (String, String) {
    let mut user = WORLD_MODEL_TEMPLATE
        .replace("{player_id}", &player_id.to_string())
        .replace("{delta}", &sample.horizon_s.to_string())
        .replace("{start_obs}", &serialize_observation(&sample.start_obs))
        .replace("{action_section}", &render_action_section(&sample.actions));
    let mut assistant = String::new();
    if cfg.no_think {
        user.push_str("\n/no_think");
        assistant.push_str("<think>\n\n</think>");
    }
    assistant.push_str(&serialize_observation(&sample.target_obs));
    debug_assert!(!has_residual_placeholder(&user));
    (user, assistant)
}

/// True if any `{lowercase_word}` placeholder survived substitution.
pub fn has_residual_placeholder(text: &str) -> bool {
    let bytes = text.as_bytes();
    let mut i = 0;
    while let Some(open) = text[i..].find('{') {
        let start = i + open + 1;
        let mut j = start;
        while j < bytes.len() && (bytes[j].is_ascii_lowercase() || bytes[j] == b'_') {
            j += 1;
        }
        if j > start && j < bytes.len() && bytes[j] == b'}' {
            return true;
        }
        i = start;
    }
    false
}
