//! Social optimum: the unique minimizer of total disutility over feasible
//! (A, p), plus the conditions and loading constructions that turn it into
//! concrete jointly Pareto-optimal contracts.

use rayon::prelude::*;
use thiserror::Error;

use crate::game::{check_core, CoalitionGame};
use crate::linalg::{cholesky, LinalgError, Matrix, Vector};
use crate::market::{self, Contract, MarketError, MarketParams, WelfareReport};
use crate::report::{ConditionEntry, Severity};

/// Grid step of the single-loading scan.
pub const LOADING_GRID_STEP: f64 = 1e-4;
/// Boundary refinement width of the single-loading scan.
pub const LOADING_REFINE_TOL: f64 = 1e-7;
const ZERO_CESSION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParetoError {
    #[error("M̄ is not positive definite: {0}")]
    SingularMbar(LinalgError),
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("p[{index}] = {value} is negative")]
    NegativeP { index: usize, value: f64 },
    #[error("member {index} cedes nothing (p = {value}); its loading is undefined")]
    ZeroCession { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

#[derive(Debug, Clone)]
pub struct ParetoSolution {
    pub a_star: Matrix,
    pub p_star: Vector,
    pub k: f64,
    pub mbar: Matrix,
    /// Verdict of `check_unicond2`: p_star is guaranteed interior.
    pub interior: bool,
}

impl ParetoSolution {
    /// The optimal (A, p) paired with a choice of loadings.
    pub fn contract(&self, eta: Vector) -> Contract {
        Contract::new(self.a_star.clone(), self.p_star.clone(), eta)
    }
}

/// Σ⁻¹μ via Cholesky.
pub(crate) fn sigma_inv_mu(params: &MarketParams) -> Result<Vector, LinalgError> {
    cholesky(params.sigma())?.solve(params.mu())
}

/// k = (μᵀΣ⁻¹μ)⁻¹
pub fn k_scalar(params: &MarketParams) -> Result<f64, ParetoError> {
    Ok(1.0 / sigma_inv_mu(params)?.dot(params.mu()))
}

/// M̄ = (γ_R + 1/Σγ⁻¹)Σ + k·D(μ²)D(γ) − kμμᵀ/Σγ⁻¹
pub fn mbar(params: &MarketParams) -> Result<Matrix, ParetoError> {
    Ok(member_part(params)?.add(&params.sigma().scale(params.gamma_r())))
}

/// The γ_R-free part of M̄ (the follower matrix M).
pub(crate) fn member_part(params: &MarketParams) -> Result<Matrix, ParetoError> {
    let k = k_scalar(params)?;
    let sg = params.sum_inv_gamma();
    let mu = params.mu();
    let d: Vec<f64> = (0..params.n()).map(|i| k * mu[i] * mu[i] * params.gamma()[i]).collect();
    Ok(params
        .sigma()
        .scale(1.0 / sg)
        .add(&Matrix::diag(&d))
        .sub(&Matrix::outer(mu, mu).scale(k / sg)))
}

/// The optimal mutualization of retained shares D(1−p):
/// A = P·D(1−p) + k(I−P)D(1−p)μμᵀΣ⁻¹ with P = D(γ)⁻¹11ᵀ/Σγ⁻¹.
pub fn allocation_for(params: &MarketParams, p: &[f64]) -> Result<Matrix, ParetoError> {
    let n = params.n();
    if p.len() != n {
        return Err(ParetoError::DimensionMismatch { expected: n, actual: p.len() });
    }
    let w = sigma_inv_mu(params)?;
    let k = 1.0 / w.dot(params.mu());
    let sg = params.sum_inv_gamma();
    let weight: Vec<f64> = params.gamma().iter().map(|g| 1.0 / (g * sg)).collect();
    let q: Vec<f64> = (0..n).map(|j| (1.0 - p[j]) * params.mu()[j]).collect();
    let q_sum: f64 = q.iter().sum();
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        let r = q[i] - weight[i] * q_sum;
        for j in 0..n {
            a[(i, j)] = weight[i] * (1.0 - p[j]) + k * r * w[j];
        }
    }
    Ok(a)
}

pub fn solve_rs(params: &MarketParams) -> Result<ParetoSolution, ParetoError> {
    let mbar = mbar(params)?;
    let chol = cholesky(&mbar).map_err(ParetoError::SingularMbar)?;
    let sigma_one = params.sigma().row_sums();
    let x = chol.solve(&sigma_one)?;
    let p_star = x.map(|v| 1.0 - params.gamma_r() * v);
    let a_star = allocation_for(params, &p_star)?;
    let interior = check_unicond2(params)?.passed();
    Ok(ParetoSolution { a_star, p_star, k: k_scalar(params)?, mbar, interior })
}

/// Three-part chain guaranteeing p_star ∈ (0,1)ⁿ. Slacks are listed as
/// (middle − left, right − middle) for each member in turn.
pub fn check_unicond2(params: &MarketParams) -> Result<ConditionEntry, ParetoError> {
    let n = params.n();
    let k = k_scalar(params)?;
    let sg = params.sum_inv_gamma();
    let (mu, s, g, gr) = (params.mu(), params.sigma(), params.gamma(), params.gamma_r());
    let pos = |x: f64| x.max(0.0);
    let mut slacks = Vec::with_capacity(2 * n);
    for i in 0..n {
        let others = (0..n).filter(|&m| m != i);
        let left = -gr * s[(i, i)]
            + others.clone().map(|m| pos(k * mu[i] * mu[m] / sg - (gr + 1.0 / sg) * s[(i, m)])).sum::<f64>();
        let middle = others.clone().map(|m| k * mu[i] * mu[m] - s[(i, m)]).sum::<f64>() / sg;
        let right = k * mu[i] * mu[i] * g[i] + (s[(i, i)] - k * mu[i] * mu[i]) / sg
            - others.map(|m| pos((gr + 1.0 / sg) * s[(i, m)] - k * mu[i] * mu[m] / sg)).sum::<f64>();
        slacks.push(middle - left);
        slacks.push(right - middle);
    }
    Ok(ConditionEntry::strict("unicond2", Severity::Required, slacks))
}

/// Smallest loadings keeping the reinsurer individually rational:
/// max{0, (γ_R/2)D(μ)⁻¹Σp}.
pub fn eta_min(params: &MarketParams, p: &[f64]) -> Result<Vector, ParetoError> {
    if p.len() != params.n() {
        return Err(ParetoError::DimensionMismatch { expected: params.n(), actual: p.len() });
    }
    if let Some((index, &value)) = p.iter().enumerate().find(|(_, &x)| x < 0.0) {
        return Err(ParetoError::NegativeP { index, value });
    }
    let sp = params.sigma().mul_vec(p);
    Ok((0..params.n())
        .map(|i| (0.5 * params.gamma_r() * sp[i] / params.mu()[i]).max(0.0))
        .collect::<Vec<_>>()
        .into())
}

/// Sufficient condition for a JPO contract with loadings at least η_min.
pub fn check_wgcond(params: &MarketParams) -> Result<ConditionEntry, ParetoError> {
    let n = params.n();
    let k = k_scalar(params)?;
    let sg = params.sum_inv_gamma();
    let (mu, s, g, gr) = (params.mu(), params.sigma(), params.gamma(), params.gamma_r());
    let pos_total: f64 = s.as_slice().iter().map(|x| x.max(0.0)).sum();
    let slacks = (0..n)
        .map(|i| {
            let share = (1.0 / g[i]) / sg;
            let row_pos: f64 = s.row(i).iter().map(|x| x.max(0.0)).sum();
            g[i] * (s[(i, i)] - share * share * pos_total - k * mu[i] * mu[i]) - gr * row_pos
        })
        .collect();
    Ok(ConditionEntry::weak("WGcond", Severity::Advisory, slacks))
}

/// Member surplus before loadings: (γ_i/2)(σ_i² − A_iΣA_iᵀ).
pub fn risk_surplus(params: &MarketParams, a: &Matrix) -> Vector {
    let s = params.sigma();
    (0..params.n())
        .map(|i| 0.5 * params.gamma()[i] * (s[(i, i)] - s.quad_form(a.row(i), a.row(i))))
        .collect::<Vec<_>>()
        .into()
}

/// Loadings that give each member exactly `targets[i]` under the Pareto
/// (A, p): η_i p_i μ_i = (γ_i/2)(σ_i² − A_iΣA_iᵀ) − c_i.
pub fn loadings_from_welfare(
    params: &MarketParams,
    sol: &ParetoSolution,
    targets: &[f64],
) -> Result<Contract, ParetoError> {
    let n = params.n();
    if targets.len() != n {
        return Err(ParetoError::DimensionMismatch { expected: n, actual: targets.len() });
    }
    let surplus = risk_surplus(params, &sol.a_star);
    let mut eta = Vec::with_capacity(n);
    for i in 0..n {
        let ceded = sol.p_star[i] * params.mu()[i];
        if sol.p_star[i].abs() <= ZERO_CESSION_TOL {
            return Err(ParetoError::ZeroCession { index: i, value: sol.p_star[i] });
        }
        eta.push((surplus[i] - targets[i]) / ceded);
    }
    Ok(sol.contract(eta.into()))
}

/// Total-welfare surplus of the Pareto (A, p) over another contract,
/// computed from disutilities: [Σρ_i + ρ_R](other) − [Σρ_i + ρ_R](Pareto).
pub fn surplus_over(params: &MarketParams, sol: &ParetoSolution, other: &Contract) -> Result<f64, ParetoError> {
    let n = params.n();
    let pareto = market::evaluate(params, &sol.contract(Vector::zeros(n)))?;
    let theirs = market::evaluate(params, other)?;
    Ok((theirs.rho_reinsurer - pareto.rho_reinsurer) + (theirs.rho_members.sum() - pareto.rho_members.sum()))
}

/// Every agent (members and reinsurer) gets the Bowley welfare plus an
/// equal share of the Pareto surplus.
pub fn jpo_equal_split(
    params: &MarketParams,
    sol: &ParetoSolution,
    bowley_contract: &Contract,
) -> Result<Contract, ParetoError> {
    let delta = surplus_over(params, sol, bowley_contract)?;
    let share = delta / (params.n() + 1) as f64;
    let base = market::welfare(params, bowley_contract)?;
    let targets: Vec<f64> = base.omega_members.iter().map(|w| w + share).collect();
    loadings_from_welfare(params, sol, &targets)
}

/// Closed interval of single loadings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Member welfare under the Pareto (A, p) with loading t on everyone is
/// affine in t: ω_i(t) = surplus_i − t·p_iμ_i.
fn single_loading_welfare(surplus: &[f64], ceded: &[f64], t: f64) -> Vec<f64> {
    surplus.iter().zip(ceded).map(|(s, c)| s - t * c).collect()
}

/// Single loadings t ≥ 0 whose welfare vector (with the reinsurer taking
/// B(N) − Σω_i) lies in the core and, when a target is given, dominates it
/// for every agent, the reinsurer included. Scanned on a fixed grid with
/// bisection at the edges, so intervals narrower than the grid step can be
/// missed.
pub fn single_loading_feasible_set(
    params: &MarketParams,
    sol: &ParetoSolution,
    game: &CoalitionGame,
    dominance_target: Option<&WelfareReport>,
) -> Result<Vec<Interval>, ParetoError> {
    let n = params.n();
    let surplus = risk_surplus(params, &sol.a_star);
    let mut ceded = Vec::with_capacity(n);
    for i in 0..n {
        if sol.p_star[i] <= ZERO_CESSION_TOL {
            return Err(ParetoError::ZeroCession { index: i, value: sol.p_star[i] });
        }
        ceded.push(sol.p_star[i] * params.mu()[i]);
    }
    // Past this loading some member's welfare is negative.
    let t_max = (0..n).map(|i| surplus[i] / ceded[i]).fold(f64::INFINITY, f64::min);
    if !(t_max >= 0.0) {
        return Ok(Vec::new());
    }
    let grand = game.grand_value();
    let target = dominance_target.map(|w| w.as_allocation());
    let feasible = |t: f64| -> bool {
        let mut c = single_loading_welfare(&surplus, &ceded, t);
        c.push(grand - c.iter().sum::<f64>());
        if let Some(target) = &target {
            if c.iter().zip(target.iter()).any(|(x, y)| *x < y - 1e-9) {
                return false;
            }
        }
        check_core(game, &c).in_core
    };

    let steps = (t_max / LOADING_GRID_STEP).ceil() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| (k as f64 * LOADING_GRID_STEP).min(t_max)).collect();
    let flags: Vec<bool> = grid.par_iter().map(|&t| feasible(t)).collect();

    let refine = |mut inside: f64, mut outside: f64| -> f64 {
        while (inside - outside).abs() > LOADING_REFINE_TOL {
            let mid = 0.5 * (inside + outside);
            if feasible(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };

    let mut out = Vec::new();
    let mut k = 0;
    while k < grid.len() {
        if !flags[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k + 1 < grid.len() && flags[k + 1] {
            k += 1;
        }
        let lo = if start == 0 { grid[0] } else { refine(grid[start], grid[start - 1]) };
        let hi = if k + 1 < grid.len() { refine(grid[k], grid[k + 1]) } else { grid[k] };
        out.push(Interval { lo, hi });
        k += 1;
    }
    Ok(out)
}

/// Interval of single loadings sandwiched between two core points' vector
/// loadings: [max_i η⁽²⁾_i, min_i η⁽¹⁾_i], nonempty only when
/// min η⁽¹⁾ ≥ max η⁽²⁾. Any t in it keeps every member between the two
/// welfare vectors.
pub fn single_loading_interval(eta1: &[f64], eta2: &[f64]) -> Option<Interval> {
    let lo = eta2.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let hi = eta1.iter().copied().fold(f64::INFINITY, f64::min);
    (lo <= hi).then_some(Interval { lo, hi })
}
