use std::fmt;

/// Errors produced when constructing or solving a cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum AssignmentError {
    /// The row lists passed to [`CostMatrix::from_rows`] do not form a square.
    NotSquare { rows: usize, cols: usize },
    /// An entry is NaN or negative.
    InvalidCost { row: usize, col: usize, value: f64 },
    /// No perfect assignment avoids every forbidden entry.
    Infeasible,
}

impl fmt::Display for AssignmentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentError::NotSquare { rows, cols } => {
                write!(f, "cost matrix must be square, got {rows} rows x {cols} cols")
            }
            AssignmentError::InvalidCost { row, col, value } => {
                write!(f, "invalid cost {value} at ({row}, {col}); costs must be finite and >= 0")
            }
            AssignmentError::Infeasible => {
                write!(f, "no perfect assignment avoids the forbidden entries")
            }
        }
    }
}

impl std::error::Error for AssignmentError {}

/// A square cost matrix whose entries are nonnegative finite costs or a
/// FORBIDDEN marker for disallowed pairings.
///
/// FORBIDDEN entries are stored as a flag rather than an infinity: the solver
/// substitutes a finite sentinel large enough that any assignment touching a
/// forbidden entry costs more than every feasible one, which keeps the
/// potential arithmetic of the augmenting-path algorithm finite.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    costs: Vec<f64>,
    forbidden: Vec<bool>,
}

impl CostMatrix {
    /// An `n` x `n` matrix of zero costs.
    pub fn new(n: usize) -> Self {
        CostMatrix {
            n,
            costs: vec![0.0; n * n],
            forbidden: vec![false; n * n],
        }
    }

    /// Builds a matrix from row-major entries. Entries must be finite and
    /// nonnegative; use [`CostMatrix::set_forbidden`] for disallowed pairs.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, AssignmentError> {
        let n = rows.len();
        let mut m = CostMatrix::new(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(AssignmentError::NotSquare { rows: n, cols: row.len() });
            }
            for (j, &c) in row.iter().enumerate() {
                m.set(i, j, c)?;
            }
        }
        Ok(m)
    }

    /// Side length of the matrix.
    pub fn size(&self) -> usize {
        self.n
    }

    /// Sets a finite cost, clearing any forbidden flag on the cell.
    pub fn set(&mut self, row: usize, col: usize, cost: f64) -> Result<(), AssignmentError> {
        if !cost.is_finite() || cost < 0.0 {
            return Err(AssignmentError::InvalidCost { row, col, value: cost });
        }
        let idx = self.idx(row, col);
        self.costs[idx] = cost;
        self.forbidden[idx] = false;
        Ok(())
    }

    /// Marks a pairing as disallowed.
    pub fn set_forbidden(&mut self, row: usize, col: usize) {
        let idx = self.idx(row, col);
        self.forbidden[idx] = true;
    }

    /// The cost of a cell, or `None` when the pairing is forbidden.
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let idx = self.idx(row, col);
        if self.forbidden[idx] {
            None
        } else {
            Some(self.costs[idx])
        }
    }

    /// True when the pairing is disallowed.
    pub fn is_forbidden(&self, row: usize, col: usize) -> bool {
        self.forbidden[self.idx(row, col)]
    }

    /// Finite sentinel substituted for forbidden cells while solving. It
    /// exceeds the cost of any feasible perfect assignment, so an optimal
    /// solution includes a sentinel only when the matrix is infeasible.
    pub(crate) fn forbidden_sentinel(&self) -> f64 {
        let max_finite = self
            .costs
            .iter()
            .zip(&self.forbidden)
            .filter(|(_, &f)| !f)
            .map(|(&c, _)| c)
            .fold(0.0_f64, f64::max);
        10.0 * self.n.max(1) as f64 * max_finite.max(1.0)
    }

    pub(crate) fn solver_cost(&self, row: usize, col: usize, sentinel: f64) -> f64 {
        let idx = self.idx(row, col);
        if self.forbidden[idx] {
            sentinel
        } else {
            self.costs[idx]
        }
    }

    fn idx(&self, row: usize, col: usize) -> usize {
        assert!(row < self.n && col < self.n, "index ({row}, {col}) out of bounds for size {}", self.n);
        row * self.n + col
    }
}
