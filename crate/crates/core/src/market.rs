//! Pool description, contracts, and their evaluation under mean-variance
//! preferences with expected-value premiums.

use thiserror::Error;

use crate::linalg::{cholesky, LinalgError, Matrix, Vector};

/// IR flags tolerate this much negative welfare.
pub const IR_SLACK: f64 = 1e-10;
/// Feasibility tolerance before scaling.
pub const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarketError {
    #[error("need at least {min} members, got {n}")]
    TooFewMembers { n: usize, min: usize },
    #[error("{field}: length {actual} does not match member count {expected}")]
    LengthMismatch { field: &'static str, expected: usize, actual: usize },
    #[error("{field}[{index}] must be positive, got {value}")]
    NotPositive { field: &'static str, index: usize, value: f64 },
    #[error("{field}[{index}] is not finite")]
    NonFinite { field: &'static str, index: usize },
    #[error("gamma_r must be a finite nonnegative number, got {0}")]
    InvalidGammaR(f64),
    #[error("sigma: {0}")]
    Sigma(LinalgError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// (n, μ, Σ, γ, γ_R). Validated on construction; fields are read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketParams {
    mu: Vector,
    sigma: Matrix,
    gamma: Vector,
    gamma_r: f64,
}

impl MarketParams {
    pub fn new(mu: Vec<f64>, sigma: Matrix, gamma: Vec<f64>, gamma_r: f64) -> Result<Self, MarketError> {
        Self::build(mu, sigma, gamma, gamma_r, 2)
    }

    /// Baseline pool of the numerical study.
    pub fn baseline() -> Self {
        let sigma = Matrix::from_rows(&[
            [10000.0, -1200.0, 720.0],
            [-1200.0, 14400.0, 648.0],
            [720.0, 648.0, 8100.0],
        ])
        .expect("static matrix");
        Self::new(vec![100.0, 125.0, 85.0], sigma, vec![0.015, 0.025, 0.02], 0.01).expect("baseline is valid")
    }

    fn build(mu: Vec<f64>, sigma: Matrix, gamma: Vec<f64>, gamma_r: f64, min_n: usize) -> Result<Self, MarketError> {
        let n = mu.len();
        if n < min_n {
            return Err(MarketError::TooFewMembers { n, min: min_n });
        }
        if gamma.len() != n {
            return Err(MarketError::LengthMismatch { field: "gamma", expected: n, actual: gamma.len() });
        }
        if sigma.rows() != n || sigma.cols() != n {
            return Err(MarketError::LengthMismatch { field: "sigma", expected: n, actual: sigma.rows() });
        }
        positive("mu", &mu)?;
        positive("gamma", &gamma)?;
        if !(gamma_r.is_finite() && gamma_r >= 0.0) {
            return Err(MarketError::InvalidGammaR(gamma_r));
        }
        for i in 0..n {
            if !(sigma[(i, i)] > 0.0) {
                return Err(MarketError::NotPositive { field: "sigma diagonal", index: i, value: sigma[(i, i)] });
            }
        }
        cholesky(&sigma).map_err(MarketError::Sigma)?;
        Ok(MarketParams { mu: mu.into(), sigma, gamma: gamma.into(), gamma_r })
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &Vector {
        &self.mu
    }

    pub fn sigma(&self) -> &Matrix {
        &self.sigma
    }

    pub fn gamma(&self) -> &Vector {
        &self.gamma
    }

    pub fn gamma_r(&self) -> f64 {
        self.gamma_r
    }

    pub fn with_gamma_r(&self, gamma_r: f64) -> Result<Self, MarketError> {
        Self::build(self.mu.to_vec(), self.sigma.clone(), self.gamma.to_vec(), gamma_r, 2)
    }

    /// Sub-market on a member subset. Unlike `new`, a single member is
    /// allowed: coalition values need one-member pools with the reinsurer.
    pub fn restrict(&self, members: &[usize]) -> Result<Self, MarketError> {
        let mu = members.iter().map(|&i| self.mu[i]).collect();
        let gamma = members.iter().map(|&i| self.gamma[i]).collect();
        Self::build(mu, self.sigma.principal(members), gamma, self.gamma_r, 1)
    }

    /// σ_i² = Σ_ii
    pub fn variances(&self) -> Vector {
        self.sigma.diagonal()
    }

    /// Disutility of bearing one's own loss: μ_i + γ_iσ_i²/2.
    pub fn status_quo_disutility(&self) -> Vector {
        let v = self.variances();
        (0..self.n()).map(|i| self.mu[i] + 0.5 * self.gamma[i] * v[i]).collect::<Vec<_>>().into()
    }

    /// Σ_j γ_j⁻¹
    pub fn sum_inv_gamma(&self) -> f64 {
        self.gamma.iter().map(|g| 1.0 / g).sum()
    }

    /// Scale for absolute tolerances on currency-valued quantities.
    pub fn currency_scale(&self) -> f64 {
        self.status_quo_disutility().sum().max(1.0)
    }
}

fn positive(field: &'static str, v: &[f64]) -> Result<(), MarketError> {
    for (index, &value) in v.iter().enumerate() {
        if !value.is_finite() {
            return Err(MarketError::NonFinite { field, index });
        }
        if value <= 0.0 {
            return Err(MarketError::NotPositive { field, index, value });
        }
    }
    Ok(())
}

/// (A, p, η): mutualization matrix, ceded proportions, safety loadings.
/// Nothing is enforced here; use `check_feasibility`.
#[derive(Debug, Clone, PartialEq)]
pub struct Contract {
    pub a: Matrix,
    pub p: Vector,
    pub eta: Vector,
}

impl Contract {
    pub fn new(a: Matrix, p: Vector, eta: Vector) -> Self {
        Contract { a, p, eta }
    }

    /// Everyone keeps their own loss.
    pub fn status_quo(n: usize) -> Self {
        Contract { a: Matrix::identity(n), p: Vector::zeros(n), eta: Vector::zeros(n) }
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub rho_members: Vector,
    pub rho_reinsurer: f64,
    pub premiums: Vector,
    pub u_members: Vector,
    pub u_total: f64,
    pub v_reinsurer: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WelfareReport {
    pub omega_members: Vector,
    pub omega_reinsurer: f64,
    pub total: f64,
    pub ir_members: Vec<bool>,
    pub ir_reinsurer: bool,
    /// False when the contract failed `check_feasibility`; the numbers are
    /// still computed but the reduced welfare formula no longer applies.
    pub feasible: bool,
}

impl WelfareReport {
    pub fn all_ir(&self) -> bool {
        self.ir_reinsurer && self.ir_members.iter().all(|&b| b)
    }

    /// (ω_1, …, ω_n, ω_R)
    pub fn as_allocation(&self) -> Vec<f64> {
        let mut c = self.omega_members.to_vec();
        c.push(self.omega_reinsurer);
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub zero_conserving_residual: f64,
    pub fairness_residual: f64,
    pub ok: bool,
}

fn check_dims(params: &MarketParams, c: &Contract) -> Result<(), MarketError> {
    let n = params.n();
    if c.a.rows() != n || c.a.cols() != n || c.p.len() != n || c.eta.len() != n {
        return Err(MarketError::DimensionMismatch(format!(
            "contract has A {}x{}, p {}, eta {}; market has n = {}",
            c.a.rows(),
            c.a.cols(),
            c.p.len(),
            c.eta.len(),
            n
        )));
    }
    Ok(())
}

/// Raw preference evaluation; works for infeasible contracts too.
pub fn evaluate(params: &MarketParams, c: &Contract) -> Result<Evaluation, MarketError> {
    check_dims(params, c)?;
    let n = params.n();
    let (mu, sigma, gamma) = (params.mu(), params.sigma(), params.gamma());
    let a_mu = c.a.mul_vec(mu);
    let rho_members: Vector = (0..n)
        .map(|i| {
            let row = c.a.row(i);
            a_mu[i] + 0.5 * gamma[i] * sigma.quad_form(row, row)
        })
        .collect::<Vec<_>>()
        .into();
    let p_sigma_p = sigma.quad_form(&c.p, &c.p);
    let rho_reinsurer = mu.dot(&c.p) + 0.5 * params.gamma_r() * p_sigma_p;
    let premiums: Vector = (0..n).map(|i| (1.0 + c.eta[i]) * c.p[i] * mu[i]).collect::<Vec<_>>().into();
    let u_members = rho_members.add(&premiums);
    let u_total = u_members.sum();
    let loading_income: f64 = (0..n).map(|i| mu[i] * c.eta[i] * c.p[i]).sum();
    let v_reinsurer = 0.5 * params.gamma_r() * p_sigma_p - loading_income;
    Ok(Evaluation { rho_members, rho_reinsurer, premiums, u_members, u_total, v_reinsurer })
}

/// Welfare gains over the status quo, using the fairness-reduced form.
pub fn welfare(params: &MarketParams, c: &Contract) -> Result<WelfareReport, MarketError> {
    let feasible = check_feasibility(params, c)?.ok;
    let n = params.n();
    let (mu, sigma, gamma) = (params.mu(), params.sigma(), params.gamma());
    let omega_members: Vector = (0..n)
        .map(|i| {
            let row = c.a.row(i);
            0.5 * gamma[i] * (sigma[(i, i)] - sigma.quad_form(row, row)) - c.eta[i] * c.p[i] * mu[i]
        })
        .collect::<Vec<_>>()
        .into();
    let loading_income: f64 = (0..n).map(|i| mu[i] * c.eta[i] * c.p[i]).sum();
    let omega_reinsurer = loading_income - 0.5 * params.gamma_r() * sigma.quad_form(&c.p, &c.p);
    let ir_members = omega_members.iter().map(|&w| w >= -IR_SLACK).collect();
    Ok(WelfareReport {
        total: omega_members.sum() + omega_reinsurer,
        omega_members,
        omega_reinsurer,
        ir_members,
        ir_reinsurer: omega_reinsurer >= -IR_SLACK,
        feasible,
    })
}

pub fn check_feasibility(params: &MarketParams, c: &Contract) -> Result<Feasibility, MarketError> {
    check_dims(params, c)?;
    let mu = params.mu();
    let zero_conserving_residual = c.a.col_sums().add(&c.p).map(|x| x - 1.0).norm_inf();
    let fairness_residual = c.a.mul_vec(mu).add(&mu.hadamard(&c.p)).sub(mu).norm_inf();
    let ok = zero_conserving_residual <= FEASIBILITY_TOL
        && fairness_residual <= FEASIBILITY_TOL * mu.norm_inf().max(1.0);
    Ok(Feasibility { zero_conserving_residual, fairness_residual, ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_quo_disutility_baseline() {
        let m = MarketParams::baseline();
        let e = evaluate(&m, &Contract::status_quo(3)).unwrap();
        assert_eq!(e.rho_members.as_slice(), &[175.0, 305.0, 166.0]);
        assert_eq!(m.status_quo_disutility().as_slice(), &[175.0, 305.0, 166.0]);
    }

    #[test]
    fn zero_cession_has_no_premium() {
        let m = MarketParams::baseline();
        let mut c = Contract::status_quo(3);
        c.eta = vec![0.3, 5.0, -1.0].into();
        let e = evaluate(&m, &c).unwrap();
        assert_eq!(e.premiums.as_slice(), &[0.0, 0.0, 0.0]);
        assert_eq!(e.v_reinsurer, 0.0);
    }

    #[test]
    fn status_quo_welfare_is_zero() {
        let m = MarketParams::baseline();
        let w = welfare(&m, &Contract::status_quo(3)).unwrap();
        assert_eq!(w.omega_members.as_slice(), &[0.0, 0.0, 0.0]);
        assert_eq!(w.omega_reinsurer, 0.0);
        assert!(w.all_ir() && w.feasible);
    }

    #[test]
    fn feasibility_residuals() {
        let m = MarketParams::baseline();
        let f = check_feasibility(&m, &Contract::status_quo(3)).unwrap();
        assert_eq!((f.zero_conserving_residual, f.fairness_residual, f.ok), (0.0, 0.0, true));
        let mut c = Contract::status_quo(3);
        c.p = Vector::filled(3, 0.5);
        let f = check_feasibility(&m, &c).unwrap();
        assert_eq!(f.zero_conserving_residual, 0.5);
        assert!(!f.ok);
        let w = welfare(&m, &c).unwrap();
        assert!(!w.feasible);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = MarketParams::baseline();
        assert!(matches!(evaluate(&m, &Contract::status_quo(2)), Err(MarketError::DimensionMismatch(_))));
    }

    #[test]
    fn validation_errors() {
        let s = Matrix::identity(2);
        assert!(matches!(
            MarketParams::new(vec![1.0], Matrix::identity(1), vec![1.0], 0.0),
            Err(MarketError::TooFewMembers { .. })
        ));
        assert!(matches!(
            MarketParams::new(vec![1.0, 1.0], s.clone(), vec![1.0], 0.0),
            Err(MarketError::LengthMismatch { field: "gamma", .. })
        ));
        assert!(matches!(
            MarketParams::new(vec![1.0, -1.0], s.clone(), vec![1.0, 1.0], 0.0),
            Err(MarketError::NotPositive { field: "mu", index: 1, .. })
        ));
        assert!(matches!(MarketParams::new(vec![1.0, 1.0], s.clone(), vec![1.0, 1.0], -0.1), Err(MarketError::InvalidGammaR(_))));
        let bad = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(
            MarketParams::new(vec![1.0, 1.0], bad, vec![1.0, 1.0], 0.0),
            Err(MarketError::Sigma(LinalgError::NotPositiveDefinite { .. }))
        ));
    }

    #[test]
    fn restrict_allows_single_member() {
        let m = MarketParams::baseline().restrict(&[2]).unwrap();
        assert_eq!(m.n(), 1);
        assert_eq!(m.sigma()[(0, 0)], 8100.0);
        assert_eq!(m.mu()[0], 85.0);
    }
}
