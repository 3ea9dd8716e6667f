//! Phase-1 simplex for feasibility of {Ax = b, x ≥ 0}, Bland's rule.
//! Dense tableau; meant for the few hundred rows of a small coalition game.

use crate::linalg::Matrix;

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-9;
const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum SimplexError {
    IterationLimit(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Phase1 {
    Feasible(Vec<f64>),
    /// Farkas certificate y with yᵀA ≤ 0 and yᵀb = objective > 0.
    Infeasible { objective: f64, certificate: Vec<f64> },
}

/// `scale` sizes the feasibility tolerance on the phase-1 objective.
pub fn phase_one(a: &Matrix, b: &[f64], scale: f64) -> Result<Phase1, SimplexError> {
    let (m, nv) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    let width = nv + m + 1;
    let rhs = width - 1;
    let mut t = vec![0.0; m * width];
    let mut sign = vec![1.0; m];
    for r in 0..m {
        sign[r] = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..nv {
            t[r * width + j] = sign[r] * a[(r, j)];
        }
        t[r * width + nv + r] = 1.0;
        t[r * width + rhs] = sign[r] * b[r];
    }
    // Reduced costs of the artificial objective, basis = artificials.
    let mut d = vec![0.0; width];
    for j in 0..nv {
        d[j] = -(0..m).map(|r| t[r * width + j]).sum::<f64>();
    }
    for j in nv..nv + m {
        d[j] = 0.0;
    }
    d[rhs] = -(0..m).map(|r| t[r * width + rhs]).sum::<f64>();
    let mut basis: Vec<usize> = (nv..nv + m).collect();

    let limit = 50 * (m + nv).max(100);
    let mut iterations = 0;
    loop {
        let Some(enter) = (0..nv).find(|&j| d[j] < -COST_EPS) else { break };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for r in 0..m {
            let coef = t[r * width + enter];
            if coef <= PIVOT_EPS {
                continue;
            }
            let ratio = t[r * width + rhs] / coef;
            let Some(l) = leave else {
                best = ratio;
                leave = Some(r);
                continue;
            };
            let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
            if (ratio < best && !tie) || (tie && basis[r] < basis[l]) {
                best = ratio;
                leave = Some(r);
            }
        }
        // The phase-1 objective is bounded below, so a column with
        // negative reduced cost always has a positive entry.
        let Some(row) = leave else { break };
        pivot(&mut t, &mut d, width, m, row, enter);
        basis[row] = enter;
        iterations += 1;
        if iterations > limit {
            return Err(SimplexError::IterationLimit(limit));
        }
    }

    let objective: f64 = (0..m).filter(|&r| basis[r] >= nv).map(|r| t[r * width + rhs]).sum();
    if objective > FEASIBILITY_TOL * scale.max(1.0) {
        let certificate = (0..m).map(|r| sign[r] * (1.0 - d[nv + r])).collect();
        return Ok(Phase1::Infeasible { objective, certificate });
    }
    let mut x = vec![0.0; nv];
    for r in 0..m {
        if basis[r] < nv {
            x[basis[r]] = t[r * width + rhs].max(0.0);
        }
    }
    Ok(Phase1::Feasible(x))
}

fn pivot(t: &mut [f64], d: &mut [f64], width: usize, m: usize, row: usize, col: usize) {
    let p = t[row * width + col];
    for j in 0..width {
        t[row * width + j] /= p;
    }
    let pivot_row: Vec<f64> = t[row * width..(row + 1) * width].to_vec();
    for r in 0..m {
        if r == row {
            continue;
        }
        let f = t[r * width + col];
        if f != 0.0 {
            for j in 0..width {
                t[r * width + j] -= f * pivot_row[j];
            }
        }
    }
    let f = d[col];
    if f != 0.0 {
        for j in 0..width {
            d[j] -= f * pivot_row[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_feasible_point() {
        // x + y = 2, x − y = 0
        let a = Matrix::from_rows(&[[1.0, 1.0], [1.0, -1.0]]).unwrap();
        match phase_one(&a, &[2.0, 0.0], 1.0).unwrap() {
            Phase1::Feasible(x) => assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // −x = −3
        let a = Matrix::from_rows(&[[-1.0]]).unwrap();
        assert_eq!(phase_one(&a, &[-3.0], 1.0).unwrap(), Phase1::Feasible(vec![3.0]));
    }

    #[test]
    fn infeasible_with_farkas_certificate() {
        // x + y = 1 and x + y = 2.
        let a = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let b = [1.0, 2.0];
        match phase_one(&a, &b, 1.0).unwrap() {
            Phase1::Infeasible { objective, certificate } => {
                assert!((objective - 1.0).abs() < 1e-12);
                let yb: f64 = certificate.iter().zip(&b).map(|(y, b)| y * b).sum();
                assert!(yb > 0.0);
                for j in 0..2 {
                    let ya: f64 = (0..2).map(|r| certificate[r] * a[(r, j)]).sum();
                    assert!(ya <= 1e-12);
                }
            }
            other => panic!("{other:?}"),
        }
    }
}
