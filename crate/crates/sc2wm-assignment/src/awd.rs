use crate::matrix::CostMatrix;
use crate::solve::hungarian_solve;

/// Penalty for a missed or hallucinated entity: the diagonal distance of a
/// 64x64 map, rounded to one decimal.
pub const DEFAULT_LAMBDA: f64 = 90.5;

/// AWD penalty derived from a map's dimensions: the diagonal length rounded
/// to one decimal.
pub fn lambda_for_map(width: u32, height: u32) -> f64 {
    let w = width as f64;
    let h = height as f64;
    ((w * w + h * h).sqrt() * 10.0).round() / 10.0
}

/// A typed point: an entity reduced to the two attributes the AWD compares.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedPoint {
    pub kind: String,
    pub pos: (f64, f64),
}

impl TypedPoint {
    pub fn new(kind: impl Into<String>, x: f64, y: f64) -> Self {
        TypedPoint { kind: kind.into(), pos: (x, y) }
    }

    fn distance(&self, other: &TypedPoint) -> f64 {
        let dx = self.pos.0 - other.pos.0;
        let dy = self.pos.1 - other.pos.1;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Outcome of an AWD evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct AwdResult {
    /// Minimum total assignment cost over the augmented matrix.
    pub total_cost: f64,
    /// `total_cost / (M + N)`; zero when both sets are empty.
    pub awd: f64,
    /// Matched `(gt_index, pred_index)` pairs, sorted by gt index.
    pub matches: Vec<(usize, usize)>,
    /// Ground-truth indices left unmatched, sorted.
    pub misses: Vec<usize>,
    /// Prediction indices left unmatched, sorted.
    pub hallucinations: Vec<usize>,
}

/// Builds the augmented cost matrix for ground truth (M points) versus
/// prediction (N points) with penalty `lambda`.
///
/// Layout, as an (M+N) x (N+M) square:
///
/// * top-left `M x N`: Euclidean distance when kinds match, FORBIDDEN
///   otherwise;
/// * top-right `M x M`: `lambda` on the diagonal (a miss), FORBIDDEN off it;
/// * bottom-left `N x N`: `lambda` on the diagonal (a hallucination),
///   FORBIDDEN off it;
/// * bottom-right `N x M`: zeros.
pub fn build_augmented_cost(gt: &[TypedPoint], pred: &[TypedPoint], lambda: f64) -> CostMatrix {
    assert!(lambda > 0.0, "lambda must be positive, got {lambda}");
    let m = gt.len();
    let n = pred.len();
    let size = m + n;
    let mut cost = CostMatrix::new(size);

    for (i, g) in gt.iter().enumerate() {
        for (j, p) in pred.iter().enumerate() {
            if g.kind == p.kind {
                cost.set(i, j, g.distance(p)).expect("distance is finite");
            } else {
                cost.set_forbidden(i, j);
            }
        }
        for k in 0..m {
            if k == i {
                cost.set(i, n + k, lambda).expect("lambda is finite");
            } else {
                cost.set_forbidden(i, n + k);
            }
        }
    }
    for j in 0..n {
        for k in 0..n {
            if k == j {
                cost.set(m + j, k, lambda).expect("lambda is finite");
            } else {
                cost.set_forbidden(m + j, k);
            }
        }
    }
    // Bottom-right block stays zero from construction.
    cost
}

/// Augmented Wasserstein Distance between two typed point sets.
///
/// Every ground-truth point is either matched to a same-kind prediction at
/// its Euclidean distance or counted as a miss at cost `lambda`; every
/// unmatched prediction is a hallucination at cost `lambda`. The optimal
/// partition is found exactly and the total is normalized by `M + N`.
/// `awd(empty, empty)` is defined as 0.
pub fn awd(gt: &[TypedPoint], pred: &[TypedPoint], lambda: f64) -> AwdResult {
    let m = gt.len();
    let n = pred.len();
    if m + n == 0 {
        return AwdResult {
            total_cost: 0.0,
            awd: 0.0,
            matches: Vec::new(),
            misses: Vec::new(),
            hallucinations: Vec::new(),
        };
    }

    let cost = build_augmented_cost(gt, pred, lambda);
    let (assignment, _) = hungarian_solve(&cost)
        .expect("augmented matrices always admit the all-miss/all-halluc assignment");

    let mut matches = Vec::new();
    let mut misses = Vec::new();
    let mut hallucinations: Vec<usize> = Vec::new();
    let mut total = 0.0;
    for (i, g) in gt.iter().enumerate() {
        let j = assignment[i];
        if j < n {
            total += g.distance(&pred[j]);
            matches.push((i, j));
        } else {
            total += lambda;
            misses.push(i);
        }
    }
    for (k, row) in assignment.iter().enumerate().take(m + n).skip(m) {
        if *row < n {
            total += lambda;
            hallucinations.push(k - m);
        }
    }
    hallucinations.sort_unstable();

    AwdResult {
        total_cost: total,
        awd: total / (m + n) as f64,
        matches,
        misses,
        hallucinations,
    }
}
