//! Transferable-utility game over members and the reinsurer: coalition
//! worths, core membership, core search, and coalitional stability.
//!
//! Agents are numbered 0..n for members and n for the reinsurer, so a
//! coalition is a bitmask whose high bit is the reinsurer.

use std::fmt;
use std::ops::{BitAnd, BitOr};

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::linalg::{Matrix, Vector};
use crate::market::{self, Contract, MarketError, MarketParams};
use crate::oracle::{self, KktProblem, OracleError};
use crate::pareto::{self, ParetoError, ParetoSolution};
use crate::report::{ConditionEntry, Severity};
use crate::simplex::{self, Phase1};

/// `build_game` enumerates 2^(n+1) coalitions.
pub const MAX_GAME_MEMBERS: usize = 16;
/// The dense phase-1 tableau has ~2^(n+2) columns; beyond this it gets big.
pub const MAX_CORE_SEARCH_MEMBERS: usize = 10;
/// Coalition inequalities may be violated by at most this much.
pub const CORE_SLACK_TOL: f64 = 1e-9;
/// Relative efficiency tolerance.
pub const EFFICIENCY_TOL: f64 = 1e-7;
const INVARIANT_TOL: f64 = 1e-9;
/// Coalition values agree with the KKT oracle to this relative accuracy.
pub const ORACLE_AGREEMENT_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("coalition without the reinsurer must have at least one member")]
    EmptyCoalition,
    #[error("member index {index} out of range for n = {n}")]
    InvalidMember { index: usize, n: usize },
    #[error("{n} members exceed the limit of {max}")]
    TooManyMembers { n: usize, max: usize },
    #[error("game needs {expected} values, got {actual}")]
    WrongSize { expected: usize, actual: usize },
    #[error("game invariant violated at {coalition}: {detail}")]
    InvariantViolated { coalition: String, detail: String },
    #[error("core is empty (phase-1 objective {objective:.3e})")]
    Infeasible { objective: f64, certificate: Vec<f64> },
    #[error("simplex did not terminate within {0} pivots")]
    IterationLimit(usize),
    #[error("coalition {coalition}: closed form {closed} disagrees with KKT oracle {oracle}")]
    OracleMismatch { coalition: String, closed: f64, oracle: f64 },
    #[error(transparent)]
    Pareto(#[from] ParetoError),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Bitmask over n members plus the reinsurer (bit n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(pub u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn agent(i: usize) -> Self {
        Coalition(1 << i)
    }

    pub fn reinsurer(n: usize) -> Self {
        Coalition(1 << n)
    }

    /// All n members and the reinsurer.
    pub fn grand(n: usize) -> Self {
        Coalition((1 << (n + 1)) - 1)
    }

    /// All members, no reinsurer.
    pub fn members_only(n: usize) -> Self {
        Coalition((1 << n) - 1)
    }

    pub fn from_members(members: &[usize], with_reinsurer: bool, n: usize) -> Self {
        let mut c = members.iter().fold(Coalition::EMPTY, |c, &i| c | Coalition::agent(i));
        if with_reinsurer {
            c = c | Coalition::reinsurer(n);
        }
        c
    }

    pub fn contains(self, agent: usize) -> bool {
        self.0 >> agent & 1 == 1
    }

    pub fn has_reinsurer(self, n: usize) -> bool {
        self.contains(n)
    }

    pub fn members(self, n: usize) -> Vec<usize> {
        (0..n).filter(|&i| self.contains(i)).collect()
    }

    pub fn without(self, agent: usize) -> Self {
        Coalition(self.0 & !(1 << agent))
    }

    pub fn size(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// One-based member labels, e.g. `{1,3,R}`.
    pub fn label(self, n: usize) -> String {
        let mut parts: Vec<String> = self.members(n).iter().map(|i| (i + 1).to_string()).collect();
        if self.has_reinsurer(n) {
            parts.push("R".into());
        }
        format!("{{{}}}", parts.join(","))
    }
}

impl BitOr for Coalition {
    type Output = Coalition;
    fn bitor(self, rhs: Coalition) -> Coalition {
        Coalition(self.0 | rhs.0)
    }
}

impl BitAnd for Coalition {
    type Output = Coalition;
    fn bitand(self, rhs: Coalition) -> Coalition {
        Coalition(self.0 & rhs.0)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#b}", self.0)
    }
}

/// Characteristic function indexed by coalition bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalitionGame {
    n: usize,
    values: Vec<f64>,
}

impl CoalitionGame {
    /// Wraps raw worths after checking the structural invariants:
    /// B(∅) = B({i}) = B({R}) = 0, B ≥ 0, and B(S∪R) ≥ B(S).
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self, GameError> {
        if n > MAX_GAME_MEMBERS {
            return Err(GameError::TooManyMembers { n, max: MAX_GAME_MEMBERS });
        }
        let expected = 1usize << (n + 1);
        if values.len() != expected {
            return Err(GameError::WrongSize { expected, actual: values.len() });
        }
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let tol = INVARIANT_TOL * scale;
        let bad = |mask: usize, detail: String| GameError::InvariantViolated {
            coalition: Coalition(mask as u32).label(n),
            detail,
        };
        for (mask, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(bad(mask, "non-finite worth".into()));
            }
            if mask.count_ones() <= 1 && v.abs() > tol {
                return Err(bad(mask, format!("worth {v} should be 0")));
            }
            if v < -tol {
                return Err(bad(mask, format!("negative worth {v}")));
            }
            let r = 1usize << n;
            if mask & r == 0 && values[mask | r] < v - tol {
                return Err(bad(mask, format!("adding the reinsurer lowers the worth from {v} to {}", values[mask | r])));
            }
        }
        Ok(CoalitionGame { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// n members plus the reinsurer.
    pub fn agents(&self) -> usize {
        self.n + 1
    }

    pub fn value(&self, c: Coalition) -> f64 {
        self.values[c.0 as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grand_value(&self) -> f64 {
        self.value(Coalition::grand(self.n))
    }

    pub fn members_only_value(&self) -> f64 {
        self.value(Coalition::members_only(self.n))
    }

    /// `{"n": …, "values": {"<bitmask>": worth, …}}`, keys ascending.
    pub fn to_json(&self) -> Value {
        let mut values = Map::new();
        for (mask, v) in self.values.iter().enumerate() {
            values.insert(mask.to_string(), json!(v));
        }
        json!({ "n": self.n, "values": Value::Object(values) })
    }
}

/// Which closed form to use for the optimal no-reinsurer mutualization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoReinsurerFormula {
    /// P = D(γ)⁻¹11ᵀ/Σγ⁻¹ in both terms (the p = 0 case of the reinsured form).
    SumInvGamma,
    /// Second term's projector divided by |C| instead.
    Cardinality,
}

/// A = P + k(I − P′)μμᵀΣ⁻¹, with P′ per `formula`.
pub fn no_reinsurer_allocation(params: &MarketParams, formula: NoReinsurerFormula) -> Result<Matrix, ParetoError> {
    let n = params.n();
    match formula {
        NoReinsurerFormula::SumInvGamma => pareto::allocation_for(params, &vec![0.0; n]),
        NoReinsurerFormula::Cardinality => {
            let w = pareto::sigma_inv_mu(params)?;
            let k = 1.0 / w.dot(params.mu());
            let sg = params.sum_inv_gamma();
            let mu = params.mu();
            let mu_sum = mu.sum();
            let mut a = Matrix::zeros(n, n);
            for i in 0..n {
                let inv_g = 1.0 / params.gamma()[i];
                let r = mu[i] - inv_g * mu_sum / n as f64;
                for j in 0..n {
                    a[(i, j)] = inv_g / sg + k * r * w[j];
                }
            }
            Ok(a)
        }
    }
}

/// Worth of a coalition: status-quo disutility minus the optimal pooled
/// disutility of its agents.
pub fn coalition_value(params: &MarketParams, members: &[usize], with_reinsurer: bool) -> Result<f64, GameError> {
    if members.is_empty() {
        return if with_reinsurer { Ok(0.0) } else { Err(GameError::EmptyCoalition) };
    }
    if let Some(&index) = members.iter().find(|&&i| i >= params.n()) {
        return Err(GameError::InvalidMember { index, n: params.n() });
    }
    let sub = params.restrict(members)?;
    let baseline = sub.status_quo_disutility().sum();
    let m = sub.n();
    let contract = if with_reinsurer {
        pareto::solve_rs(&sub)?.contract(Vector::zeros(m))
    } else {
        Contract::new(no_reinsurer_allocation(&sub, NoReinsurerFormula::SumInvGamma)?, Vector::zeros(m), Vector::zeros(m))
    };
    let e = market::evaluate(&sub, &contract)?;
    Ok(baseline - e.rho_members.sum() - e.rho_reinsurer)
}

/// Same worth computed from the direct KKT solve instead of the closed form.
pub fn coalition_value_oracle(params: &MarketParams, members: &[usize], with_reinsurer: bool) -> Result<f64, GameError> {
    if members.is_empty() {
        return if with_reinsurer { Ok(0.0) } else { Err(GameError::EmptyCoalition) };
    }
    let sub = params.restrict(members)?;
    let problem = if with_reinsurer { KktProblem::RiskSharing } else { KktProblem::NoReinsurer };
    let sol = oracle::kkt_solve(&sub, &problem)?;
    let m = sub.n();
    let e = market::evaluate(&sub, &Contract::new(sol.a, sol.p, Vector::zeros(m)))?;
    Ok(sub.status_quo_disutility().sum() - e.rho_members.sum() - e.rho_reinsurer)
}

fn mask_worth(params: &MarketParams, mask: usize, n: usize) -> Result<f64, GameError> {
    let c = Coalition(mask as u32);
    let members = c.members(n);
    let with_r = c.has_reinsurer(n);
    if members.is_empty() && !with_r {
        return Ok(0.0);
    }
    coalition_value(params, &members, with_r)
}

pub fn build_game(params: &MarketParams) -> Result<CoalitionGame, GameError> {
    let n = params.n();
    if n > MAX_GAME_MEMBERS {
        return Err(GameError::TooManyMembers { n, max: MAX_GAME_MEMBERS });
    }
    let values = (0..1usize << (n + 1))
        .into_par_iter()
        .map(|mask| mask_worth(params, mask, n))
        .collect::<Result<Vec<_>, _>>()?;
    CoalitionGame::from_values(n, values)
}

/// `build_game` plus a KKT cross-check of every coalition worth.
pub fn build_game_verified(params: &MarketParams) -> Result<CoalitionGame, GameError> {
    let game = build_game(params)?;
    let n = params.n();
    (1..1usize << (n + 1)).into_par_iter().try_for_each(|mask| {
        let c = Coalition(mask as u32);
        let members = c.members(n);
        if members.is_empty() {
            return Ok(());
        }
        let closed = game.value(c);
        let oracle = coalition_value_oracle(params, &members, c.has_reinsurer(n))?;
        let scale = closed.abs().max(params.currency_scale() * 1e-3);
        if (closed - oracle).abs() > ORACLE_AGREEMENT_TOL * scale {
            return Err(GameError::OracleMismatch { coalition: c.label(n), closed, oracle });
        }
        Ok(())
    })?;
    Ok(game)
}

/// Max deviation of each no-reinsurer closed form from the KKT solution on
/// the full member set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormulaResolution {
    pub sum_inv_gamma_deviation: f64,
    pub cardinality_deviation: f64,
}

impl FormulaResolution {
    pub fn matching(&self, tol: f64) -> Vec<NoReinsurerFormula> {
        let mut out = Vec::new();
        if self.sum_inv_gamma_deviation <= tol {
            out.push(NoReinsurerFormula::SumInvGamma);
        }
        if self.cardinality_deviation <= tol {
            out.push(NoReinsurerFormula::Cardinality);
        }
        out
    }
}

pub fn resolve_no_reinsurer_formula(params: &MarketParams) -> Result<FormulaResolution, GameError> {
    let truth = oracle::kkt_solve(params, &KktProblem::NoReinsurer)?.a;
    let dev = |f| -> Result<f64, GameError> { Ok(no_reinsurer_allocation(params, f)?.sub(&truth).max_abs()) };
    Ok(FormulaResolution {
        sum_inv_gamma_deviation: dev(NoReinsurerFormula::SumInvGamma)?,
        cardinality_deviation: dev(NoReinsurerFormula::Cardinality)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub coalition: Coalition,
    /// Σ_{i∈C} c_i − B(C); negative.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreCheck {
    pub in_core: bool,
    /// Σ c_i − B(N).
    pub efficiency_gap: f64,
    pub efficient: bool,
    /// Coalitions (singletons included) whose inequality fails; most
    /// violated first.
    pub violated: Vec<Violation>,
    /// Agents with negative payoff.
    pub negative: Vec<usize>,
}

/// Core membership of c = (c_1, …, c_n, c_R).
pub fn check_core(game: &CoalitionGame, alloc: &[f64]) -> CoreCheck {
    check_core_within(game, alloc, &vec![0.0; alloc.len()])
}

/// Core membership when each c_i is only known to ±radius_i (e.g. values
/// rounded for display): a constraint fails only if it fails for every
/// point of the box.
pub fn check_core_within(game: &CoalitionGame, alloc: &[f64], radius: &[f64]) -> CoreCheck {
    let agents = game.agents();
    assert_eq!(alloc.len(), agents, "allocation must have n + 1 entries");
    assert_eq!(radius.len(), agents, "radius must have n + 1 entries");
    let grand = Coalition::grand(game.n);
    let total: f64 = alloc.iter().sum();
    let efficiency_gap = total - game.grand_value();
    let spread: f64 = radius.iter().sum();
    let efficient = efficiency_gap.abs() <= spread + EFFICIENCY_TOL * game.grand_value().abs().max(1.0);
    let mut violated = Vec::new();
    for mask in 1..grand.0 {
        let c = Coalition(mask);
        let members = (0..agents).filter(|&i| c.contains(i));
        let sum: f64 = members.clone().map(|i| alloc[i]).sum();
        let slack = sum - game.value(c);
        let give: f64 = members.map(|i| radius[i]).sum();
        if slack + give < -CORE_SLACK_TOL {
            violated.push(Violation { coalition: c, slack });
        }
    }
    violated.sort_by(|a, b| a.slack.total_cmp(&b.slack).then(a.coalition.cmp(&b.coalition)));
    let negative: Vec<usize> = (0..agents).filter(|&i| alloc[i] + radius[i] < -CORE_SLACK_TOL).collect();
    CoreCheck { in_core: efficient && violated.is_empty() && negative.is_empty(), efficiency_gap, efficient, violated, negative }
}

/// Some point of the core, from a phase-1 simplex over
/// {Σ_{i∈C} c_i − s_C = B(C), Σ c_i = B(N), c, s ≥ 0}.
pub fn find_core_element(game: &CoalitionGame) -> Result<Vector, GameError> {
    let n = game.n;
    if n > MAX_CORE_SEARCH_MEMBERS {
        return Err(GameError::TooManyMembers { n, max: MAX_CORE_SEARCH_MEMBERS });
    }
    let agents = game.agents();
    let grand = Coalition::grand(n).0;
    // Rows: every proper nonempty coalition, then the grand coalition.
    let proper: Vec<u32> = (1..grand).collect();
    let rows = proper.len() + 1;
    let cols = agents + proper.len();
    let mut a = Matrix::zeros(rows, cols);
    let mut b = vec![0.0; rows];
    for (r, &mask) in proper.iter().enumerate() {
        for i in 0..agents {
            if Coalition(mask).contains(i) {
                a[(r, i)] = 1.0;
            }
        }
        a[(r, agents + r)] = -1.0;
        b[r] = game.value(Coalition(mask));
    }
    for i in 0..agents {
        a[(rows - 1, i)] = 1.0;
    }
    b[rows - 1] = game.grand_value();

    let scale = game.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    match simplex::phase_one(&a, &b, scale)? {
        Phase1::Feasible(x) => Ok(x[..agents].to_vec().into()),
        Phase1::Infeasible { objective, certificate } => Err(GameError::Infeasible { objective, certificate }),
    }
}

impl From<simplex::SimplexError> for GameError {
    fn from(e: simplex::SimplexError) -> Self {
        match e {
            simplex::SimplexError::IterationLimit(k) => GameError::IterationLimit(k),
        }
    }
}

/// Welfare at the Pareto (A, p) with the smallest admissible loadings,
/// compared with each member's marginal contribution B(N) − B(N∖{i}).
pub fn check_core_bound(params: &MarketParams, sol: &ParetoSolution, game: &CoalitionGame) -> Result<ConditionEntry, GameError> {
    let n = params.n();
    let eta = pareto::eta_min(params, &sol.p_star)?;
    let w = market::welfare(params, &sol.contract(eta))?;
    let grand = Coalition::grand(n);
    let slacks = (0..n)
        .map(|i| w.omega_members[i] - (game.value(grand) - game.value(grand.without(i))))
        .collect();
    Ok(ConditionEntry::weak("coreBound", Severity::Advisory, slacks))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stability {
    pub stable: bool,
    pub jp_optimal: bool,
    /// A coalition that can do better on its own: the grand coalition when
    /// (A, p) is not the social optimum, else the most violated one.
    pub blocking: Option<Coalition>,
    pub core: CoreCheck,
}

/// Tolerance for matching (A, p) against the social optimum.
pub const JPO_MATCH_TOL: f64 = 1e-7;

pub fn check_stability(params: &MarketParams, game: &CoalitionGame, contract: &Contract) -> Result<Stability, GameError> {
    let sol = pareto::solve_rs(params)?;
    let jp_optimal = contract.a.sub(&sol.a_star).max_abs() <= JPO_MATCH_TOL
        && contract.p.sub(&sol.p_star).norm_inf() <= JPO_MATCH_TOL;
    let w = market::welfare(params, contract)?;
    let mut alloc = w.omega_members.to_vec();
    alloc.push(game.grand_value() - w.omega_members.sum());
    let core = check_core(game, &alloc);
    let blocking = if !jp_optimal {
        Some(Coalition::grand(params.n()))
    } else {
        core.violated.first().map(|v| v.coalition)
    };
    Ok(Stability { stable: jp_optimal && w.feasible && core.in_core, jp_optimal, blocking, core })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coalition_bits() {
        let c = Coalition::from_members(&[0, 2], true, 3);
        assert_eq!(c.0, 0b1101);
        assert_eq!(c.label(3), "{1,3,R}");
        assert_eq!(c.members(3), vec![0, 2]);
        assert!(c.has_reinsurer(3));
        assert_eq!(c.without(3), Coalition(0b0101));
        assert_eq!(Coalition::grand(3).0, 15);
        assert_eq!(Coalition::members_only(3).0, 7);
        assert_eq!((c & Coalition::members_only(3)).size(), 2);
    }

    #[test]
    fn singleton_without_reinsurer_is_worthless() {
        let m = MarketParams::baseline();
        for i in 0..3 {
            assert!(coalition_value(&m, &[i], false).unwrap().abs() < 1e-12);
        }
        assert_eq!(coalition_value(&m, &[], true).unwrap(), 0.0);
        assert_eq!(coalition_value(&m, &[], false), Err(GameError::EmptyCoalition));
        assert!(matches!(coalition_value(&m, &[5], false), Err(GameError::InvalidMember { index: 5, n: 3 })));
    }

    #[test]
    fn single_member_with_reinsurer() {
        // One member with the reinsurer: p = γ/(γ+γ_R), worth ½σ²γ²/(γ+γ_R).
        // Cross-checked by brute force over p.
        let m = MarketParams::baseline();
        let b = coalition_value(&m, &[0], true).unwrap();
        let (s2, g, gr) = (10000.0, 0.015, 0.01);
        let best = (0..=100_000)
            .map(|k| {
                let p = k as f64 / 100_000.0;
                0.5 * g * s2 - 0.5 * g * (1.0 - p) * (1.0 - p) * s2 - 0.5 * gr * p * p * s2
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((b - best).abs() < 1e-6);
        assert!((b - 45.0).abs() < 1e-9);
    }

    #[test]
    fn from_values_checks_invariants() {
        assert!(matches!(CoalitionGame::from_values(1, vec![0.0; 3]), Err(GameError::WrongSize { .. })));
        let mut v = vec![0.0; 8];
        v[1] = 1.0;
        assert!(matches!(CoalitionGame::from_values(2, v), Err(GameError::InvariantViolated { .. })));
        // B({1,2}) = 5 but B({1,2,R}) = 4.
        let mut v = vec![0.0; 8];
        v[3] = 5.0;
        v[7] = 4.0;
        assert!(matches!(CoalitionGame::from_values(2, v), Err(GameError::InvariantViolated { .. })));
        assert!(matches!(CoalitionGame::from_values(17, vec![]), Err(GameError::TooManyMembers { .. })));
    }

    #[test]
    fn degenerate_game_core_search() {
        let mut v = vec![0.0; 8];
        v[7] = 1.0;
        let g = CoalitionGame::from_values(2, v).unwrap();
        let c = find_core_element(&g).unwrap();
        assert!(check_core(&g, &c).in_core);
        assert!((c.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_core_yields_certificate() {
        // Every pair is worth 10, so is everyone: pairs sum to 30 > 2·10.
        let mut v = vec![0.0; 8];
        for mask in [3, 5, 6, 7] {
            v[mask] = 10.0;
        }
        let g = CoalitionGame::from_values(2, v).unwrap();
        match find_core_element(&g) {
            Err(GameError::Infeasible { objective, certificate }) => {
                assert!(objective > 1e-6);
                assert_eq!(certificate.len(), 7);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn efficiency_failure_is_caught() {
        let mut v = vec![0.0; 8];
        v[7] = 3.0;
        let g = CoalitionGame::from_values(2, v).unwrap();
        let check = check_core(&g, &[1.0, 1.0, 2.0]);
        assert!(!check.in_core && !check.efficient);
        assert_eq!(check.efficiency_gap, 1.0);
        assert!(check.violated.is_empty());
    }

    #[test]
    fn rounding_radius() {
        // B({1,2}) = 2, B(N) = 3.
        let mut v = vec![0.0; 8];
        v[3] = 2.0;
        v[7] = 3.0;
        let g = CoalitionGame::from_values(2, v).unwrap();
        let c = [0.95, 0.95, 1.15];
        assert!(!check_core(&g, &c).in_core);
        assert!(check_core_within(&g, &c, &[0.05; 3]).in_core);
        assert!(!check_core_within(&g, &c, &[0.04; 3]).in_core);
    }

    #[test]
    fn json_export_shape() {
        let mut v = vec![0.0; 8];
        v[7] = 1.5;
        let g = CoalitionGame::from_values(2, v).unwrap();
        let s = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(s, r#"{"n":2,"values":{"0":0.0,"1":0.0,"2":0.0,"3":0.0,"4":0.0,"5":0.0,"6":0.0,"7":1.5}}"#);
    }
}
