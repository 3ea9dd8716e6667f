//! Leader–follower design: the reinsurer sets loadings anticipating the
//! pool's optimal response, then the pool mutualizes and cedes.

use thiserror::Error;

use crate::linalg::{self, cholesky, dominance_margins, eigen_sym, inf_norm, invert, Cholesky, LinalgError, Matrix, Vector};
use crate::market::{self, Contract, MarketError, MarketParams, IR_SLACK};
use crate::pareto::{self, ParetoError, ParetoSolution};
use crate::report::{ConditionEntry, ConditionReport, Severity, Status};

/// Relative agreement required between the closed-form and direct ω_R.
pub const OMEGA_R_REL_TOL: f64 = 1e-8;
const PARAMS_MATCH_TOL: f64 = 1e-9;
/// Below this ‖p_gap‖∞ the Bowley contract would count as Pareto-optimal.
pub const JPO_GAP_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BowleyError {
    #[error("follower matrix M is not positive definite: {0}")]
    SingularSystem(LinalgError),
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("solutions were computed from different market parameters")]
    ParamsMismatch,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

/// M = M̄ − γ_RΣ, the pool's response matrix.
pub fn m_matrix(params: &MarketParams) -> Result<Matrix, BowleyError> {
    Ok(pareto::member_part(params)?)
}

/// The pool's best response to loadings, with M factored once.
#[derive(Debug, Clone)]
pub struct FollowerModel {
    params: MarketParams,
    m: Matrix,
    chol: Cholesky,
}

#[derive(Debug, Clone)]
pub struct FollowerResponse {
    pub contract: Contract,
    /// Every p_i strictly inside (0, 1). Out-of-range values are kept.
    pub interior: bool,
}

impl FollowerModel {
    pub fn new(params: &MarketParams) -> Result<Self, BowleyError> {
        let m = m_matrix(params)?;
        let chol = cholesky(&m).map_err(BowleyError::SingularSystem)?;
        Ok(FollowerModel { params: params.clone(), m, chol })
    }

    pub fn m(&self) -> &Matrix {
        &self.m
    }

    /// p*(η) = 1 − M⁻¹D(μ)η
    pub fn cession(&self, eta: &[f64]) -> Vector {
        let rhs = self.params.mu().hadamard(eta);
        let x = self.chol.solve(&rhs).expect("dimension checked by caller");
        x.map(|v| 1.0 - v)
    }

    pub fn respond(&self, eta: &[f64]) -> Result<FollowerResponse, BowleyError> {
        let n = self.params.n();
        if eta.len() != n {
            return Err(BowleyError::DimensionMismatch { expected: n, actual: eta.len() });
        }
        let p = self.cession(eta);
        let a = pareto::allocation_for(&self.params, &p)?;
        let interior = p.iter().all(|&x| 0.0 < x && x < 1.0);
        Ok(FollowerResponse { contract: Contract::new(a, p, eta.into()), interior })
    }

    /// v(η, p*(η)) = (γ_R/2)pᵀΣp − (D(μ)η)ᵀp
    pub fn reinsurer_disutility(&self, eta: &[f64]) -> f64 {
        let p = self.cession(eta);
        let s = self.params.sigma();
        0.5 * self.params.gamma_r() * s.quad_form(&p, &p) - self.params.mu().hadamard(eta).dot(&p)
    }
}

pub fn follower(params: &MarketParams, eta: &[f64]) -> Result<FollowerResponse, BowleyError> {
    FollowerModel::new(params)?.respond(eta)
}

/// Bounds on μ_iη_i that keep p*(η) interior. Slacks are
/// (μ_iη_i − lower_i, upper_i − μ_iη_i) per member.
pub fn check_unicond(params: &MarketParams, eta: &[f64]) -> Result<ConditionEntry, BowleyError> {
    let n = params.n();
    if eta.len() != n {
        return Err(BowleyError::DimensionMismatch { expected: n, actual: eta.len() });
    }
    let (lo, hi) = unicond_bounds(params, params.sum_inv_gamma())?;
    let mu = params.mu();
    let slacks = interleave(&lo, &hi, |i, l, h| (mu[i] * eta[i] - l, h - mu[i] * eta[i]));
    let entry = ConditionEntry::strict("unicond", Severity::Advisory, slacks);

    // The same chain with the member's own γ⁻¹ left out of the lower bound's
    // denominator, as one rearrangement of it is printed.
    let alt_ok = (0..n).all(|i| {
        let others: f64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / params.gamma()[j]).sum();
        let alt_lo = lo[i] * params.sum_inv_gamma() / others;
        alt_lo < mu[i] * eta[i] && mu[i] * eta[i] < hi[i]
    });
    let verdict = if alt_ok { "pass" } else { "fail" };
    Ok(entry.with_note(format!("with Σ_{{j≠i}}γ_j⁻¹ in the lower bound's denominator: {verdict}")))
}

fn unicond_bounds(params: &MarketParams, denom: f64) -> Result<(Vec<f64>, Vec<f64>), BowleyError> {
    let n = params.n();
    let k = pareto::k_scalar(params)?;
    let sg = params.sum_inv_gamma();
    let (mu, s, g) = (params.mu(), params.sigma(), params.gamma());
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for i in 0..n {
        let (mut up, mut down) = (0.0, 0.0);
        for m in (0..n).filter(|&m| m != i) {
            let d = s[(i, m)] - k * mu[i] * mu[m];
            up += d.max(0.0);
            down += (-d).max(0.0);
        }
        lo.push(up / denom);
        hi.push(-down / sg + k * mu[i] * mu[i] * g[i] + (s[(i, i)] - k * mu[i] * mu[i]) / sg);
    }
    Ok((lo, hi))
}

fn interleave(a: &[f64], b: &[f64], f: impl Fn(usize, f64, f64) -> (f64, f64)) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * a.len());
    for i in 0..a.len() {
        let (x, y) = f(i, a[i], b[i]);
        out.push(x);
        out.push(y);
    }
    out
}

#[derive(Debug, Clone)]
pub struct BowleySolution {
    pub m: Matrix,
    pub eta_star: Vector,
    pub a_star: Matrix,
    pub p_star: Vector,
    /// The common loading when solved under the single-loading restriction.
    pub single_loading: Option<f64>,
    /// ½·1ᵀ(γ_R M⁻¹ΣM⁻¹ + 2M⁻¹)⁻¹1; only for unrestricted loadings.
    pub omega_r_closed: Option<f64>,
    /// ω_R evaluated on the contract.
    pub omega_r_direct: f64,
    /// Direct individual rationality of everyone at the optimum.
    pub direct_ir: bool,
    /// Labelled optimal only when direct IR holds.
    pub bowley_optimal: bool,
    pub condition_report: ConditionReport,
}

impl BowleySolution {
    pub fn contract(&self) -> Contract {
        Contract::new(self.a_star.clone(), self.p_star.clone(), self.eta_star.clone())
    }
}

fn direct_ir_entry(w: &market::WelfareReport) -> ConditionEntry {
    let mut slacks = w.omega_members.to_vec();
    slacks.push(w.omega_reinsurer);
    ConditionEntry::from_slacks("bowley.direct_ir", Severity::Required, slacks, |s| s >= -IR_SLACK)
}

/// Optimal per-member loadings η* = D(μ)⁻¹M(γ_RΣ+2M)⁻¹(γ_RΣ+M)1.
pub fn leader(params: &MarketParams) -> Result<BowleySolution, BowleyError> {
    let model = FollowerModel::new(params)?;
    let m = model.m().clone();
    let n = params.n();
    let gs = params.sigma().scale(params.gamma_r());
    let x = linalg::solve(&gs.add(&m.scale(2.0)), &gs.add(&m).row_sums())?;
    let eta_star: Vector = m.mul_vec(&x).zip_with(params.mu(), |a, mu| a / mu);
    let resp = model.respond(&eta_star)?;

    let m_inv = invert(&m)?;
    let q = m_inv.matmul(params.sigma()).matmul(&m_inv).scale(params.gamma_r()).add(&m_inv.scale(2.0));
    let omega_r_closed = 0.5 * linalg::solve(&q.symmetrized(), &vec![1.0; n])?.sum();

    let w = market::welfare(params, &resp.contract)?;
    let mut report = ConditionReport::default();
    report.push(check_unicond(params, &eta_star)?);
    report.push(check_mircond(params)?);
    report.push(check_delta_ine(params)?);
    report.push(ConditionEntry::weak("eta_star_nonnegative", Severity::Advisory, eta_star.to_vec()));
    let ir = direct_ir_entry(&w);
    let direct_ir = ir.passed();
    report.push(ir);

    Ok(BowleySolution {
        m,
        eta_star,
        a_star: resp.contract.a,
        p_star: resp.contract.p,
        single_loading: None,
        omega_r_closed: Some(omega_r_closed),
        omega_r_direct: w.omega_reinsurer,
        direct_ir,
        bowley_optimal: direct_ir,
        condition_report: report,
    })
}

/// Optimal common loading
/// η* = μᵀ(I + γ_R M⁻¹Σ)1 / μᵀ(2M⁻¹ + γ_R M⁻¹ΣM⁻¹)μ.
pub fn leader_single(params: &MarketParams) -> Result<BowleySolution, BowleyError> {
    let model = FollowerModel::new(params)?;
    let m = model.m().clone();
    let n = params.n();
    let (mu, s, gr) = (params.mu(), params.sigma(), params.gamma_r());
    let m_inv_s1 = linalg::solve(&m, &s.row_sums())?;
    let numer = mu.sum() + gr * mu.dot(&m_inv_s1);
    let m_inv_mu = linalg::solve(&m, mu)?;
    let denom = 2.0 * mu.dot(&m_inv_mu) + gr * s.quad_form(&m_inv_mu, &m_inv_mu);
    let t = numer / denom;
    let eta = Vector::filled(n, t);
    let resp = model.respond(&eta)?;
    let w = market::welfare(params, &resp.contract)?;

    let mut report = ConditionReport::default();
    report.push(check_unicond(params, &eta)?);
    report.push(check_mircond(params)?);
    report.push(check_single_loading_nonneg(params)?);
    report.push(ConditionEntry::weak("eta_star_nonnegative", Severity::Advisory, vec![t]));
    let ir = direct_ir_entry(&w);
    let direct_ir = ir.passed();
    report.push(ir);

    Ok(BowleySolution {
        m,
        eta_star: eta,
        a_star: resp.contract.a,
        p_star: resp.contract.p,
        single_loading: Some(t),
        omega_r_closed: None,
        omega_r_direct: w.omega_reinsurer,
        direct_ir,
        bowley_optimal: direct_ir,
        condition_report: report,
    })
}

/// Sufficient condition for members' IR at the leader's optimum.
pub fn check_mircond(params: &MarketParams) -> Result<ConditionEntry, BowleyError> {
    let n = params.n();
    let k = pareto::k_scalar(params)?;
    let sg = params.sum_inv_gamma();
    let (mu, s, g) = (params.mu(), params.sigma(), params.gamma());
    let pos_total: f64 = s.as_slice().iter().map(|x| x.max(0.0)).sum();
    let slacks = (0..n)
        .map(|i| {
            let share = (1.0 / g[i]) / sg;
            let others: f64 = (0..n).filter(|&m| m != i).map(|m| (k * mu[i] * mu[m] - s[(i, m)]).max(0.0)).sum();
            0.5 * g[i] * (s[(i, i)] - share * share * pos_total - 3.0 * k * mu[i] * mu[i])
                + (others + k * mu[i] * mu[i] - s[(i, i)]) / sg
        })
        .collect();
    Ok(ConditionEntry::weak("MIRcond", Severity::Advisory, slacks))
}

/// δ_M + (γ_R/2)δ_Σ ≥ γ_R²‖Σ‖∞²/(2(2δ_M + γ_Rδ_Σ)), meaningful only when M
/// and Σ are strictly diagonally dominant.
pub fn check_delta_ine(params: &MarketParams) -> Result<ConditionEntry, BowleyError> {
    let m = m_matrix(params)?;
    let dm = dominance_margins(&m).min();
    let ds = dominance_margins(params.sigma()).min();
    let ns = inf_norm(params.sigma());
    let gr = params.gamma_r();
    let slack = dm + 0.5 * gr * ds - gr * gr * ns * ns / (2.0 * (2.0 * dm + gr * ds));
    let mut e = ConditionEntry::weak("deltaINE", Severity::Advisory, vec![slack])
        .with_note(format!("delta_M = {dm}, delta_Sigma = {ds}, norm_inf(Sigma) = {ns}"));
    if !(dm > 0.0 && ds > 0.0) {
        e.status = Status::Inconclusive;
        e.notes.push("M or Sigma is not strictly diagonally dominant; says nothing about eta* >= 0".into());
    }
    Ok(e)
}

/// γ_R ≤ δ_M/‖Σ‖∞ with M strictly dominant: the common loading is ≥ 0.
pub fn check_single_loading_nonneg(params: &MarketParams) -> Result<ConditionEntry, BowleyError> {
    let dm = dominance_margins(&m_matrix(params)?).min();
    let bound = dm / inf_norm(params.sigma());
    let mut e = ConditionEntry::weak("single_loading_nonneg", Severity::Advisory, vec![bound - params.gamma_r()])
        .with_note(format!("delta_M / norm_inf(Sigma) = {bound}"));
    if !(dm > 0.0) {
        e.status = Status::Inconclusive;
        e.notes.push("M is not strictly diagonally dominant".into());
    }
    Ok(e)
}

/// Explicit bounds on the leader's loadings and what they say about the
/// interior condition at η*.
#[derive(Debug, Clone)]
pub struct LoadingBounds {
    /// μ_iη*_i from the closed-form leader.
    pub exact_mu_eta: Vector,
    /// ½[Σ_j(σ_ij − kμ_iμ_j)/Σγ⁻¹ + kμ_i²γ_i] + (γ_R/4)Σ_jσ_ij: μ_iη*_i
    /// without the second-order term.
    pub first_order_mu_eta: Vector,
    /// |γ_R²[Σ(γ_RΣ+2M)⁻¹Σ1]_i|
    pub perturbation: Vector,
    /// κ_i as printed (the μ_j cross terms enter with a plus sign).
    pub kappa_printed: Vector,
    /// Row dominance margins of γ_RΣ + 2M (what κ_i is meant to be).
    pub kappa_direct: Vector,
    /// γ_R²‖Σ‖∞ max_j|Σ_kσ_jk| / κ_min with printed κ; None if κ_min ≤ 0.
    pub varah_printed: Option<f64>,
    /// Same with the direct dominance margins; None if not dominant.
    pub varah_direct: Option<f64>,
    /// λ_min(L⁻¹ML⁻ᵀ), Σ = LLᵀ.
    pub lambda_min: f64,
    /// γ_R²‖Σ1‖₂ / (γ_R + 2λ_min).
    pub spectral_printed: f64,
    /// γ_R²√σ_ii √(1ᵀΣ1) / (γ_R + 2λ_min), per member.
    pub spectral_rigorous: Vector,
    /// Per-member bound used for the interior verdict (smallest valid one).
    pub tightest_valid: Vector,
    pub entries: Vec<ConditionEntry>,
}

pub fn appendix_k_bounds(params: &MarketParams) -> Result<LoadingBounds, BowleyError> {
    let n = params.n();
    let k = pareto::k_scalar(params)?;
    let sg = params.sum_inv_gamma();
    let (mu, s, g, gr) = (params.mu(), params.sigma(), params.gamma(), params.gamma_r());
    let m = m_matrix(params)?;
    let sol = leader(params)?;
    let exact_mu_eta = sol.eta_star.hadamard(mu);
    let row = s.row_sums();

    let m_one = m.row_sums();
    let first_order_mu_eta: Vector = (0..n).map(|i| 0.5 * m_one[i] + 0.25 * gr * row[i]).collect::<Vec<_>>().into();
    let kmat = s.scale(gr).add(&m.scale(2.0));
    let inner = linalg::solve(&kmat, &row)?;
    let perturbation = s.mul_vec(&inner).map(|x| (gr * gr * x).abs());

    let kappa_printed: Vector = (0..n)
        .map(|i| {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| s[(i, j)].abs()).sum();
            let mu_others: f64 = (0..n).filter(|&j| j != i).map(|j| mu[j]).sum();
            (gr + 2.0 / sg) * (s[(i, i)] - off) + 2.0 * k * mu[i] * mu[i] * (g[i] - 1.0 / sg) + 2.0 * k * mu[i] / sg * mu_others
        })
        .collect::<Vec<_>>()
        .into();
    let kappa_direct = dominance_margins(&kmat);
    let ns = inf_norm(s);
    let max_row = row.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let varah = |kmin: f64| (kmin > 0.0).then(|| gr * gr * ns * max_row / kmin);
    let varah_printed = varah(kappa_printed.min());
    let varah_direct = varah(kappa_direct.min());

    let chol = cholesky(s).map_err(BowleyError::SingularSystem)?;
    let l_inv = chol.inverse_factor();
    let congruence = l_inv.matmul(&m).matmul(&l_inv.transpose()).symmetrized();
    let lambda_min = eigen_sym(&congruence)?.min();
    let denom = gr + 2.0 * lambda_min;
    let row_norm2 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
    let spectral_printed = gr * gr * row_norm2 / denom;
    let total_var = row.sum().max(0.0).sqrt();
    let spectral_rigorous = s.diagonal().map(|v| gr * gr * v.sqrt() * total_var / denom);

    let tightest_valid: Vector = (0..n)
        .map(|i| varah_direct.map_or(spectral_rigorous[i], |v| v.min(spectral_rigorous[i])))
        .collect::<Vec<_>>()
        .into();

    let mut entries = Vec::new();
    if gr == 0.0 {
        let lhs: Vec<f64> = (0..n).map(|i| k * mu[i] * mu[i] * g[i] + (s[(i, i)] - k * mu[i] * mu[i]) / sg).collect();
        let abs_off: Vec<f64> = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).map(|j| (s[(i, j)] - k * mu[i] * mu[j]).abs()).sum::<f64>() / sg)
            .collect();
        let slacks = (0..n).map(|i| lhs[i] - abs_off[i]).collect();
        let dev = exact_mu_eta.sub(&m_one.scale(0.5)).norm_inf();
        entries.push(
            ConditionEntry::strict("unicond2_gamma_r_zero", Severity::Advisory, slacks)
                .with_note(format!("max |mu_i eta*_i - (M1)_i/2| = {dev:.3e}")),
        );
    } else {
        let bound_entry = |name: &str, bound: Option<Vec<f64>>| -> ConditionEntry {
            match bound {
                Some(b) => {
                    let slacks = (0..n).map(|i| b[i] - perturbation[i]).collect();
                    ConditionEntry::weak(name, Severity::Advisory, slacks)
                }
                None => ConditionEntry {
                    name: name.into(),
                    status: Status::Inconclusive,
                    severity: Severity::Advisory,
                    margin: f64::NAN,
                    slacks: Vec::new(),
                    notes: vec!["KappaNonpositive: Varah route unavailable".into()],
                },
            }
        };
        entries.push(
            bound_entry("bound.varah_printed", varah_printed.map(|v| vec![v; n]))
                .with_note("kappa as printed; overstates the dominance margin of gamma_R*Sigma + 2M"),
        );
        entries.push(bound_entry("bound.varah_direct", varah_direct.map(|v| vec![v; n])));
        entries.push(
            bound_entry("bound.spectral_printed", Some(vec![spectral_printed; n]))
                .with_note("as printed; not a valid bound for every market"),
        );
        entries.push(bound_entry("bound.spectral_rigorous", Some(spectral_rigorous.to_vec())));

        // Interior check at η*, with the second-order term only known to
        // lie within ±bound/4.
        let (lo, hi) = unicond_bounds(params, sg)?;
        let slacks = interleave(&lo, &hi, |i, l, h| {
            let b = 0.25 * tightest_valid[i];
            (first_order_mu_eta[i] - b - l, h - first_order_mu_eta[i] - b)
        });
        let mut e = ConditionEntry::strict("unicond_at_eta_star_bounded", Severity::Advisory, slacks);
        if e.status == Status::Fail {
            e.status = Status::Inconclusive;
            e.notes.push("unverified by the bound; see unicond for the exact check".into());
        }
        entries.push(e);
    }

    Ok(LoadingBounds {
        exact_mu_eta,
        first_order_mu_eta,
        perturbation,
        kappa_printed,
        kappa_direct,
        varah_printed,
        varah_direct,
        lambda_min,
        spectral_printed,
        spectral_rigorous,
        tightest_valid,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// p_pareto − p_bowley
    pub p_gap: Vector,
    pub pareto_total: f64,
    pub bowley_total: f64,
    /// Pareto total welfare − Bowley total welfare.
    pub total_welfare_gap: f64,
    pub bowley_is_jpo: bool,
}

pub fn compare(params: &MarketParams, pareto: &ParetoSolution, bowley: &BowleySolution) -> Result<Comparison, BowleyError> {
    let mbar = pareto::mbar(params)?;
    let m = m_matrix(params)?;
    let scale = mbar.max_abs().max(1.0);
    if pareto.mbar.rows() != params.n()
        || bowley.m.rows() != params.n()
        || pareto.mbar.sub(&mbar).max_abs() > PARAMS_MATCH_TOL * scale
        || bowley.m.sub(&m).max_abs() > PARAMS_MATCH_TOL * scale
    {
        return Err(BowleyError::ParamsMismatch);
    }
    let n = params.n();
    let pareto_total = market::welfare(params, &pareto.contract(Vector::zeros(n)))?.total;
    let bowley_total = market::welfare(params, &bowley.contract())?.total;
    let p_gap = pareto.p_star.sub(&bowley.p_star);
    Ok(Comparison {
        bowley_is_jpo: p_gap.norm_inf() <= JPO_GAP_TOL,
        p_gap,
        pareto_total,
        bowley_total,
        total_welfare_gap: pareto_total - bowley_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn zero_loading_means_full_cession() {
        let m = MarketParams::baseline();
        let r = follower(&m, &[0.0; 3]).unwrap();
        assert!(close(&r.contract.p, &[1.0; 3], 1e-15));
        assert!(!r.interior);
    }

    #[test]
    fn baseline_leader() {
        let m = MarketParams::baseline();
        let b = leader(&m).unwrap();
        assert!(close(&b.eta_star, &[0.3457749, 0.7259183, 0.460025], 1e-6));
        assert!(close(&b.p_star, &[0.2653988, 0.3181274, 0.269785], 1e-6));
        let closed = b.omega_r_closed.unwrap();
        assert!((closed - 34.77795784).abs() < 1e-6);
        assert!((closed - b.omega_r_direct).abs() <= OMEGA_R_REL_TOL * closed);
        assert!(b.bowley_optimal);
    }

    #[test]
    fn baseline_single_loading() {
        let m = MarketParams::baseline();
        let b = leader_single(&m).unwrap();
        assert!((b.single_loading.unwrap() - 0.4950501486755965).abs() < 1e-12);
        assert!(close(&b.p_star, &[0.1489135, 0.4455945, 0.2441992], 1e-6));
        assert!(b.omega_r_closed.is_none());
        let e = b.condition_report.get("single_loading_nonneg").unwrap();
        assert_eq!(e.status, Status::Fail);
        assert!((e.margin - (44.49017413 / 16248.0 - 0.01)).abs() < 1e-9);
    }

    #[test]
    fn risk_neutral_leader_takes_half() {
        let m = MarketParams::baseline().with_gamma_r(0.0).unwrap();
        let b = leader(&m).unwrap();
        assert!(close(&b.p_star, &[0.5; 3], 1e-10));
    }

    #[test]
    fn unicond_cases() {
        let m = MarketParams::baseline();
        let b = leader(&m).unwrap();
        let e = check_unicond(&m, &b.eta_star).unwrap();
        assert!(e.passed());
        assert!(close(&e.slacks, &[34.58, 9.91, 90.74, 46.37, 39.10, 13.28], 1e-2));
        // At η = 0 the lower bound bites wherever some σ_im − kμ_iμ_m > 0.
        let e0 = check_unicond(&m, &[0.0; 3]).unwrap();
        let k = pareto::k_scalar(&m).unwrap();
        for i in 0..3 {
            let positive = (0..3).filter(|&j| j != i).any(|j| m.sigma()[(i, j)] - k * m.mu()[i] * m.mu()[j] > 0.0);
            assert_eq!(e0.slacks[2 * i] <= 0.0, true);
            if positive {
                assert!(e0.slacks[2 * i] < 0.0);
            }
        }
        assert!(!check_unicond(&m, &[1e6; 3]).unwrap().passed());
    }

    #[test]
    fn mircond_baseline_fails_yet_direct_ir_holds() {
        let m = MarketParams::baseline();
        let e = check_mircond(&m).unwrap();
        assert!(close(&e.slacks, &[-42.84, -52.22, -31.83], 1e-2));
        assert!(leader(&m).unwrap().direct_ir);
    }

    #[test]
    fn mircond_identical_diagonal_hand_reduction() {
        // Two identical independent members, γ_R = 0: k = σ²/(2μ²), the
        // cross term (kμ² − 0)₊ = σ²/2, share = 1/2, Σ(σ_jl)₊ = 2σ².
        let (mu, s2, g) = (40.0, 2500.0, 0.04);
        let m = MarketParams::new(vec![mu, mu], Matrix::diag(&[s2, s2]), vec![g, g], 0.0).unwrap();
        let sg = 2.0 / g;
        let kmu2 = s2 / 2.0;
        let hand = 0.5 * g * (s2 - 0.25 * 2.0 * s2 - 3.0 * kmu2) + (kmu2 + kmu2 - s2) / sg;
        let e = check_mircond(&m).unwrap();
        assert!(close(&e.slacks, &[hand, hand], 1e-9));
        // σ² ≫ the rest: first term dominates only if shares are small, so use many members.
        let big = MarketParams::new(vec![1.0, 1.0, 1.0], Matrix::diag(&[1e6, 1.0, 1.0]), vec![1.0, 1e-3, 1e-3], 0.0).unwrap();
        assert!(check_mircond(&big).unwrap().slacks[0] > 0.0);
    }

    #[test]
    fn delta_ine_cases() {
        let m = MarketParams::baseline();
        let e = check_delta_ine(&m).unwrap();
        assert_eq!(e.status, Status::Fail);
        assert!((e.margin + 6.3018).abs() < 1e-3);
        assert!(leader(&m).unwrap().eta_star.min() >= 0.0);
        let e0 = check_delta_ine(&m.with_gamma_r(0.0).unwrap()).unwrap();
        assert!(e0.passed() && e0.margin > 0.0);
        let heavy = Matrix::from_rows(&[[1.0, 0.6, 0.6], [0.6, 1.0, 0.6], [0.6, 0.6, 1.0]]).unwrap();
        let m = MarketParams::new(vec![1.0, 1.0, 1.0], heavy.scale(1e4), vec![0.01; 3], 0.01).unwrap();
        let e = check_delta_ine(&m).unwrap();
        assert_eq!(e.status, Status::Inconclusive);
    }

    #[test]
    fn appendix_k_at_baseline() {
        let m = MarketParams::baseline();
        let b = appendix_k_bounds(&m).unwrap();
        assert!(close(&b.perturbation, &[45.87, 49.73, 43.03], 1e-2));
        assert!((b.varah_printed.unwrap() - 74.218).abs() < 1e-3);
        assert!((b.spectral_printed - 84.7245).abs() < 1e-3);
        assert!((b.lambda_min - 0.0063829787).abs() < 1e-9);
        for i in 0..3 {
            assert!(b.perturbation[i] <= b.varah_printed.unwrap());
            assert!(b.perturbation[i] <= b.spectral_printed);
            assert!(b.perturbation[i] <= b.varah_direct.unwrap());
            assert!(b.perturbation[i] <= b.spectral_rigorous[i]);
        }
        // exact = first order − perturbation/4 (signed term is positive here).
        let rebuilt = b.first_order_mu_eta.sub(&b.perturbation.scale(0.25));
        assert!(close(&rebuilt, &b.exact_mu_eta, 1e-9));
    }

    #[test]
    fn appendix_k_risk_neutral() {
        let m = MarketParams::baseline().with_gamma_r(0.0).unwrap();
        let b = appendix_k_bounds(&m).unwrap();
        let half_m1 = m_matrix(&m).unwrap().row_sums().scale(0.5);
        assert!(close(&b.exact_mu_eta, &half_m1, 1e-10));
        assert_eq!(b.entries.len(), 1);
        assert_eq!(b.entries[0].name, "unicond2_gamma_r_zero");
    }

    #[test]
    fn comparison_gaps() {
        let m = MarketParams::baseline();
        let p = pareto::solve_rs(&m).unwrap();
        let c1 = compare(&m, &p, &leader(&m).unwrap()).unwrap();
        assert!((c1.total_welfare_gap - 4.679523422).abs() < 1e-6);
        let c2 = compare(&m, &p, &leader_single(&m).unwrap()).unwrap();
        assert!((c2.total_welfare_gap - (268.95137301 - 263.8875)).abs() < 1e-3);
        assert!(!c1.bowley_is_jpo && !c2.bowley_is_jpo);

        let m0 = m.with_gamma_r(0.0).unwrap();
        let c0 = compare(&m0, &pareto::solve_rs(&m0).unwrap(), &leader(&m0).unwrap()).unwrap();
        assert!(close(&c0.p_gap, &[0.5; 3], 1e-10));

        let other = m.with_gamma_r(0.02).unwrap();
        assert_eq!(compare(&other, &p, &leader(&m).unwrap()).unwrap_err(), BowleyError::ParamsMismatch);
    }
}
