//! Brute-force cross-checks that share no algebra with the closed forms:
//! one dense KKT solve per equality-constrained quadratic program, central
//! finite differences, and grid search over loadings.
//!
//! Decision vector layout: vec(A) row-major (n² entries), then p (n).

use rayon::prelude::*;
use thiserror::Error;

use crate::bowley::{self, BowleyError, FollowerModel};
use crate::linalg::{LinalgError, Lu, Matrix, Vector};
use crate::market::MarketParams;
use crate::pareto::{self, ParetoError};

/// Grid searches refuse more points than this.
pub const MAX_GRID_POINTS: usize = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("KKT matrix is singular: {0}")]
    SingularKkt(LinalgError),
    #[error("objective is not finite at coordinate {index}")]
    NonFiniteEvaluation { index: usize },
    #[error("grid of {points} points over {dims} dimensions is too large")]
    GridTooLarge { dims: usize, points: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Bowley(#[from] BowleyError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
}

/// Which program to solve.
#[derive(Debug, Clone, PartialEq)]
pub enum KktProblem {
    /// Total disutility of members and reinsurer over (A, p).
    RiskSharing,
    /// Members' total cost Σρ_i + Σπ_i over (A, p) at fixed loadings.
    Follower { eta: Vector },
    /// Members only, p fixed at 0; variables are vec(A).
    NoReinsurer,
}

impl KktProblem {
    fn has_p(&self) -> bool {
        !matches!(self, KktProblem::NoReinsurer)
    }
}

/// min ½xᵀHx + gᵀx  s.t.  Cx = rhs.
#[derive(Debug, Clone)]
pub struct KktSystem {
    pub dim: usize,
    pub h: Matrix,
    pub g: Vector,
    pub c: Matrix,
    pub rhs: Vector,
}

impl KktSystem {
    /// [[H, Cᵀ], [C, 0]]
    pub fn stacked(&self) -> Matrix {
        let (d, m) = (self.dim, self.c.rows());
        let mut k = Matrix::zeros(d + m, d + m);
        for i in 0..d {
            for j in 0..d {
                k[(i, j)] = self.h[(i, j)];
            }
        }
        for r in 0..m {
            for j in 0..d {
                k[(d + r, j)] = self.c[(r, j)];
                k[(j, d + r)] = self.c[(r, j)];
            }
        }
        k
    }
}

/// All 2n equality rows: zero-conservation per column j, then fairness per
/// row i. They are linearly dependent: weighting the first block by μ_j
/// gives the sum of the second.
pub fn constraint_rows(params: &MarketParams, with_p: bool) -> (Matrix, Vector) {
    let n = params.n();
    let mu = params.mu();
    let dim = n * n + if with_p { n } else { 0 };
    let mut c = Matrix::zeros(2 * n, dim);
    let mut rhs = vec![0.0; 2 * n];
    for j in 0..n {
        for i in 0..n {
            c[(j, i * n + j)] = 1.0;
        }
        if with_p {
            c[(j, n * n + j)] = 1.0;
        }
        rhs[j] = 1.0;
    }
    for i in 0..n {
        for j in 0..n {
            c[(n + i, i * n + j)] = mu[j];
        }
        if with_p {
            c[(n + i, n * n + i)] = mu[i];
        }
        rhs[n + i] = mu[i];
    }
    (c, rhs.into())
}

pub fn assemble(params: &MarketParams, problem: &KktProblem) -> KktSystem {
    let n = params.n();
    let (mu, s, g) = (params.mu(), params.sigma(), params.gamma());
    let with_p = problem.has_p();
    let dim = n * n + if with_p { n } else { 0 };
    let mut h = Matrix::zeros(dim, dim);
    let mut lin = vec![0.0; dim];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                h[(i * n + j, i * n + l)] = g[i] * s[(j, l)];
            }
            lin[i * n + j] = mu[j];
        }
    }
    match problem {
        KktProblem::RiskSharing => {
            for j in 0..n {
                for l in 0..n {
                    h[(n * n + j, n * n + l)] = params.gamma_r() * s[(j, l)];
                }
                lin[n * n + j] = mu[j];
            }
        }
        KktProblem::Follower { eta } => {
            for j in 0..n {
                lin[n * n + j] = (1.0 + eta[j]) * mu[j];
            }
        }
        KktProblem::NoReinsurer => {}
    }
    let (c_full, rhs_full) = constraint_rows(params, with_p);
    // Drop the last fairness row, which the others imply.
    let m = 2 * n - 1;
    let mut c = Matrix::zeros(m, dim);
    for r in 0..m {
        for j in 0..dim {
            c[(r, j)] = c_full[(r, j)];
        }
    }
    KktSystem { dim, h, g: lin.into(), c, rhs: rhs_full[..m].to_vec().into() }
}

#[derive(Debug, Clone)]
pub struct KktSolution {
    pub a: Matrix,
    /// Zero for `NoReinsurer`.
    pub p: Vector,
    pub multipliers: Vector,
}

pub fn kkt_solve(params: &MarketParams, problem: &KktProblem) -> Result<KktSolution, OracleError> {
    let n = params.n();
    if let KktProblem::Follower { eta } = problem {
        if eta.len() != n {
            return Err(OracleError::InvalidGrid(format!("eta has length {}, expected {n}", eta.len())));
        }
    }
    let sys = assemble(params, problem);
    let k = sys.stacked();
    let mut b = sys.g.scale(-1.0).into_vec();
    b.extend_from_slice(&sys.rhs);
    let x = Lu::factor(&k).and_then(|lu| lu.solve_vec(&b)).map_err(OracleError::SingularKkt)?;
    let a = Matrix::new(n, n, x[..n * n].to_vec()).map_err(OracleError::SingularKkt)?;
    let p = if problem.has_p() { x[n * n..n * n + n].to_vec().into() } else { Vector::zeros(n) };
    Ok(KktSolution { a, p, multipliers: x[sys.dim..].to_vec().into() })
}

/// Interface form: the risk-sharing problem when `include_reinsurer_term`,
/// otherwise the follower problem at `eta`.
pub fn kkt_solve_rs(
    params: &MarketParams,
    include_reinsurer_term: bool,
    eta: Option<&[f64]>,
) -> Result<(Matrix, Vector), OracleError> {
    let problem = match (include_reinsurer_term, eta) {
        (true, None) => KktProblem::RiskSharing,
        (false, Some(eta)) => KktProblem::Follower { eta: eta.into() },
        _ => {
            return Err(OracleError::InvalidGrid(
                "eta is required for the follower problem and not allowed otherwise".into(),
            ))
        }
    };
    let s = kkt_solve(params, &problem)?;
    Ok((s.a, s.p))
}

/// Which objective the stationarity residual refers to.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective<'a> {
    RiskSharing,
    Follower(&'a [f64]),
}

/// Plugs (A, p) and the multipliers ψ = kD(γ)D(1−p)μ,
/// φᵀ = 1ᵀ(D(1−p)Σ − kD(1−p)μμᵀ)/Σγ⁻¹ into the Lagrangian first-order
/// conditions (with the fairness-reduced objective) and returns the largest
/// absolute residual.
pub fn stationarity_residual(params: &MarketParams, a: &Matrix, p: &[f64], objective: Objective) -> Result<f64, OracleError> {
    let n = params.n();
    let (mu, s, g) = (params.mu(), params.sigma(), params.gamma());
    let k = pareto::k_scalar(params)?;
    let sg = params.sum_inv_gamma();
    let retained: Vec<f64> = p.iter().map(|x| 1.0 - x).collect();
    let psi: Vec<f64> = (0..n).map(|i| k * g[i] * retained[i] * mu[i]).collect();
    let retained_mu: f64 = (0..n).map(|i| retained[i] * mu[i]).sum();
    let phi: Vec<f64> = (0..n)
        .map(|j| ((0..n).map(|i| retained[i] * s[(i, j)]).sum::<f64>() - k * mu[j] * retained_mu) / sg)
        .collect();

    let a_sigma = a.scale_rows(g).matmul(s);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a_sigma[(i, j)] - phi[j] - psi[i] * mu[j]).abs());
        }
    }
    let sp = s.mul_vec(p);
    for i in 0..n {
        let first = match objective {
            Objective::RiskSharing => params.gamma_r() * sp[i],
            Objective::Follower(eta) => mu[i] * eta[i],
        };
        worst = worst.max((first - mu[i] * psi[i] - phi[i]).abs());
    }
    Ok(worst)
}

/// Central differences with step rel_step·(1 + |x_i|).
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], rel_step: f64) -> Result<Vector, OracleError> {
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let h = rel_step * (1.0 + x[i].abs());
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        if !(up.is_finite() && down.is_finite()) {
            return Err(OracleError::NonFiniteEvaluation { index: i });
        }
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad.into())
}

/// The reinsurer's disutility v(η, p*(η)) after the members respond.
pub fn leader_objective(params: &MarketParams, eta: &[f64]) -> Result<f64, OracleError> {
    Ok(FollowerModel::new(params)?.reinsurer_disutility(eta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridOptimum {
    pub best_eta: Vector,
    pub best_value: f64,
}

/// Exhaustive search of v(η, p*(η)) on a `points_per_dim`-per-axis grid
/// spanning [lo, hi]. Ties go to the lowest grid index.
pub fn grid_leader(params: &MarketParams, lo: &[f64], hi: &[f64], points_per_dim: usize) -> Result<GridOptimum, OracleError> {
    let n = params.n();
    if n > 3 {
        return Err(OracleError::GridTooLarge { dims: n, points: (points_per_dim as f64).powi(n as i32) });
    }
    check_box(lo, hi, n, points_per_dim)?;
    let total = points_per_dim.checked_pow(n as u32).filter(|&t| t <= MAX_GRID_POINTS);
    let Some(total) = total else {
        return Err(OracleError::GridTooLarge { dims: n, points: (points_per_dim as f64).powi(n as i32) });
    };
    let model = FollowerModel::new(params)?;
    let at = |idx: usize| -> Vec<f64> {
        let mut rem = idx;
        (0..n)
            .map(|d| {
                let k = rem % points_per_dim;
                rem /= points_per_dim;
                lo[d] + (hi[d] - lo[d]) * k as f64 / (points_per_dim - 1) as f64
            })
            .collect()
    };
    let (idx, best_value) = argmin(total, |i| model.reinsurer_disutility(&at(i)));
    Ok(GridOptimum { best_eta: at(idx).into(), best_value })
}

/// One-dimensional search over single loadings η·1.
pub fn grid_leader_single(params: &MarketParams, lo: f64, hi: f64, points: usize) -> Result<GridOptimum, OracleError> {
    check_box(&[lo], &[hi], 1, points)?;
    let model = FollowerModel::new(params)?;
    let n = params.n();
    let at = |i: usize| lo + (hi - lo) * i as f64 / (points - 1) as f64;
    let (idx, best_value) = argmin(points, |i| model.reinsurer_disutility(&vec![at(i); n]));
    Ok(GridOptimum { best_eta: Vector::filled(n, at(idx)), best_value })
}

fn check_box(lo: &[f64], hi: &[f64], n: usize, points: usize) -> Result<(), OracleError> {
    if lo.len() != n || hi.len() != n {
        return Err(OracleError::InvalidGrid(format!("bounds must have length {n}")));
    }
    if points < 2 {
        return Err(OracleError::InvalidGrid("need at least two points per axis".into()));
    }
    if lo.iter().zip(hi).any(|(l, h)| !(l < h)) {
        return Err(OracleError::InvalidGrid("lo must be strictly below hi".into()));
    }
    Ok(())
}

fn argmin(total: usize, f: impl Fn(usize) -> f64 + Sync) -> (usize, f64) {
    (0..total)
        .into_par_iter()
        .map(|i| (i, f(i)))
        .reduce(
            || (usize::MAX, f64::INFINITY),
            |a, b| match a.1.total_cmp(&b.1) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Equal => if a.0 <= b.0 { a } else { b },
            },
        )
}

/// Convenience: the closed-form leader's loadings, for bracketing grids.
pub fn closed_form_eta(params: &MarketParams) -> Result<Vector, OracleError> {
    Ok(bowley::leader(params)?.eta_star)
}
