use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::DatasetError;

/// A trajectory-level train/valid/test partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub train: Vec<String>,
    pub valid: Vec<String>,
    pub test: Vec<String>,
    pub seed: u64,
}

impl SplitManifest {
    pub fn split_of(&self, trajectory_id: &str) -> Option<&'static str> {
        if self.train.iter().any(|t| t == trajectory_id) {
            Some("train")
        } else if self.valid.iter().any(|t| t == trajectory_id) {
            Some("valid")
        } else if self.test.iter().any(|t| t == trajectory_id) {
            Some("test")
        } else {
            None
        }
    }
}

/// Largest-remainder apportionment of `n` items over the ratio triple;
/// remainder ties go to the earlier bucket, so a single trajectory lands in
/// train.
fn apportion(n: usize, ratios: (u32, u32, u32)) -> [usize; 3] {
    let r = [ratios.0 as usize, ratios.1 as usize, ratios.2 as usize];
    let total: usize = r.iter().sum();
    let mut counts = [0usize; 3];
    let mut rem: Vec<(usize, usize)> = Vec::new();
    for i in 0..3 {
        counts[i] = n * r[i] / total;
        rem.push((n * r[i] % total, i));
    }
    let assigned: usize = counts.iter().sum();
    rem.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for k in 0..(n - assigned) {
        counts[rem[k].1] += 1;
    }
    counts
}

/// Splits trajectory ids at trajectory granularity: sort, shuffle with a
/// seeded ChaCha20 stream (byte-stable across platforms), cut by
/// largest-remainder counts. Same seed, same partition, always.
pub fn split_trajectories(
    ids: &[String],
    ratios: (u32, u32, u32),
    seed: u64,
) -> Result<SplitManifest, DatasetError> {
    if ids.is_empty() {
        return Err(DatasetError::Invalid("no trajectory ids to split".to_string()));
    }
    if ratios.0 + ratios.1 + ratios.2 == 0 {
        return Err(DatasetError::Invalid("split ratios must not all be zero".to_string()));
    }
    let mut sorted: Vec<String> = ids.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != ids.len() {
        return Err(DatasetError::Invalid("duplicate trajectory ids".to_string()));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    sorted.shuffle(&mut rng);
    let counts = apportion(sorted.len(), ratios);

    let mut remaining = sorted;
    let test = remaining.split_off(counts[0] + counts[1]);
    let valid = remaining.split_off(counts[0]);
    let mut manifest = SplitManifest { train: remaining, valid, test, seed };
    manifest.train.sort();
    manifest.valid.sort();
    manifest.test.sort();
    Ok(manifest)
}
