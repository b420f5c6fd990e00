use crate::matrix::{AssignmentError, CostMatrix};

/// Solves the linear sum assignment problem exactly.
///
/// Returns `assignment` with `assignment[row] = col` and the minimum total
/// cost. Rows are processed in ascending index order, which makes the chosen
/// assignment deterministic when several share the optimal cost.
///
/// Errors with [`AssignmentError::Infeasible`] when every perfect assignment
/// crosses a forbidden entry.
pub fn hungarian_solve(cost: &CostMatrix) -> Result<(Vec<usize>, f64), AssignmentError> {
    let n = cost.size();
    if n == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let sentinel = cost.forbidden_sentinel();

    // Shortest augmenting path formulation with potentials, O(n^3).
    // Indices are 1-based internally; p[j] is the row matched to column j.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost.solver_cost(i0 - 1, j - 1, sentinel) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    let mut total = 0.0;
    for j in 1..=n {
        let row = p[j] - 1;
        let col = j - 1;
        assignment[row] = col;
        if cost.is_forbidden(row, col) {
            return Err(AssignmentError::Infeasible);
        }
        total += cost.get(row, col).expect("checked not forbidden");
    }
    Ok((assignment, total))
}
