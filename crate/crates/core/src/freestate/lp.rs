//! Phase-I simplex for convex-hull membership.
//!
//! Decides whether `target` is a convex combination of `points` by
//! minimizing the total artificial slack of
//! `sum_j lambda_j p_j = target, sum_j lambda_j = 1, lambda >= 0`.
//! When the minimum is positive, the optimal dual gives a linear functional
//! `w` with `w . target > max_j w . p_j`.

/// Objective values at or below this count as membership.
pub const MEMBERSHIP_TOL: f64 = 1e-7;

const PIVOT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// Convex weights reproducing the target up to the membership tolerance.
    Inside { weights: Vec<f64> },
    /// `functional . target - max_j functional . p_j == margin > 0`.
    Outside { functional: Vec<f64>, margin: f64 },
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside { .. })
    }
}

/// `points` and `target` must all have the same length.
pub fn hull_membership(points: &[Vec<f64>], target: &[f64]) -> Membership {
    let dim = target.len();
    let n = points.len();
    // rows: one per coordinate, plus the convexity row
    let m = dim + 1;
    let rhs: Vec<f64> = target.iter().copied().chain(std::iter::once(1.0)).collect();
    let sign: Vec<f64> = rhs.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();

    // tableau columns: n structural, m artificial, then the right-hand side
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, p) in points.iter().enumerate() {
            let a = if i < dim { p[i] } else { 1.0 };
            row[j] = sign[i] * a;
        }
        row[n + i] = 1.0;
        row[width - 1] = sign[i] * rhs[i];
    }
    let cost = |col: usize| if col >= n && col < n + m { 1.0 } else { 0.0 };
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        // reduced costs r_j = c_j - c_B . column_j; Bland: first negative
        let entering = (0..n + m).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let z: f64 = (0..m).map(|i| cost(basis[i]) * t[i][j]).sum();
            cost(j) - z < -1e-11
        });
        let Some(e) = entering else { break };
        // ratio test, ties broken by smallest basis index
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][e] > PIVOT_TOL {
                let ratio = t[i][width - 1] / t[i][e];
                let better = match leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[i] < basis[l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            // unbounded cannot happen for a nonnegative objective
            break;
        };
        let pivot = t[r][e];
        for v in t[r].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && row[e] != 0.0 {
                let f = row[e];
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        basis[r] = e;
    }

    let objective: f64 = (0..m).map(|i| cost(basis[i]) * t[i][width - 1]).sum();
    if objective <= MEMBERSHIP_TOL {
        let mut weights = vec![0.0; n];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                weights[b] = t[i][width - 1].max(0.0);
            }
        }
        return Membership::Inside { weights };
    }
    // the artificial block of the tableau holds B^-1; y' = c_B B^-1 in the
    // sign-flipped rows, y = S y' in the original ones
    let y: Vec<f64> = (0..m)
        .map(|k| sign[k] * (0..m).map(|i| cost(basis[i]) * t[i][n + k]).sum::<f64>())
        .collect();
    let functional = y[..dim].to_vec();
    let offset = y[dim];
    let dot = |p: &[f64]| p.iter().zip(&functional).map(|(a, b)| a * b).sum::<f64>();
    let best = points.iter().map(|p| dot(p)).fold(f64::NEG_INFINITY, f64::max);
    let margin = dot(target) - best;
    debug_assert!(dot(target) + offset > 0.0);
    Membership::Outside { functional, margin }
}
