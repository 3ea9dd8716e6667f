//! Command dispatch: builds the contracts, tables and condition reports.

use log::{debug, info};
use p2p_reins::bowley::{self, BowleySolution};
use p2p_reins::game::{self, CoalitionGame, GameError, NoReinsurerFormula};
use p2p_reins::market::{self, check_feasibility, evaluate, welfare};
use p2p_reins::pareto::{self, single_loading_feasible_set, Interval};
use p2p_reins::{
    BowleyError, ConditionEntry, ConditionReport, Contract, MarketError, MarketParams, Matrix, ParetoError, ParetoSolution,
    Severity, Status, Vector,
};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, MarketConfig, SweepConfig};
use crate::output::{indexed, Cell, RunOutput, Table};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
    #[error(transparent)]
    Bowley(#[from] BowleyError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("no single loading puts JPO2 in the core above BO2; pass --jpo2-t")]
    NoJpo2Window,
    #[error("allocation: {0}")]
    Allocation(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Pareto,
    Bowley,
    Game,
    /// Welfare allocation (ω_1, …, ω_n, ω_R) and the rounding radius of
    /// each value.
    CoreCheck { allocation: Vec<f64>, radius: Vec<f64> },
    Tables,
    Sweep,
    Validate,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Options {
    /// Overrides the config's `jpo2_t`.
    pub jpo2_t: Option<f64>,
    pub single_loading: bool,
}

/// Parses `a,b,c` (whitespace tolerated).
pub fn parse_allocation(s: &str) -> Result<Vec<f64>, CommandError> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| CommandError::Allocation(format!("{x:?}: {e}"))))
        .collect()
}

/// Half a unit in the last written digit of each value: `53.1558` may stand
/// for anything in 53.1558 ± 0.00005. Exponent notation counts as exact.
pub fn rounding_radius(s: &str) -> Vec<f64> {
    s.split(',')
        .map(|x| {
            let x = x.trim();
            if x.contains(['e', 'E']) {
                return 0.0;
            }
            let decimals = x.split_once('.').map_or(0, |(_, frac)| frac.len());
            0.5 * 10f64.powi(-(decimals as i32))
        })
        .collect()
}

pub fn run_command(cmd: &Command, cfg: &MarketConfig, params: &MarketParams, opts: &Options) -> Result<RunOutput, CommandError> {
    info!("running {cmd:?} on n = {} members, gamma_R = {}", params.n(), params.gamma_r());
    let t = opts.jpo2_t.or(cfg.jpo2_t);
    match cmd {
        Command::Pareto => pareto_cmd(params),
        Command::Bowley => bowley_cmd(params, opts.single_loading),
        Command::Game => game_cmd(params),
        Command::CoreCheck { allocation, radius } => core_check_cmd(params, allocation, radius),
        Command::Tables => tables_cmd(params, t),
        Command::Sweep => sweep_cmd(params, &cfg.sweep.clone().unwrap_or_default()),
        Command::Validate => validate_cmd(params, t),
    }
}

fn prefixed(prefix: &str, report: &ConditionReport) -> Vec<ConditionEntry> {
    report
        .entries
        .iter()
        .map(|e| ConditionEntry { name: format!("{prefix}.{}", e.name), ..e.clone() })
        .collect()
}

fn matrix_table(name: &str, a: &Matrix) -> Table {
    let n = a.rows();
    let mut header = vec!["i".to_string()];
    header.extend(indexed("a", n));
    let mut t = Table::new(name, header);
    for i in 0..n {
        let mut row: Vec<Cell> = vec![(i + 1).to_string().into()];
        row.extend(a.row(i).iter().map(|&v| Cell::Num(v)));
        t.push(row);
    }
    t
}

fn labelled(label: &str, values: impl IntoIterator<Item = f64>) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![label.into()];
    row.extend(values.into_iter().map(Cell::Num));
    row
}

/// Every contract the tables are built from.
pub struct Contracts {
    pub pareto: ParetoSolution,
    pub bo1: BowleySolution,
    pub bo2: BowleySolution,
    pub jpo1: Contract,
    pub jpo2: Contract,
    pub jpo2_t: f64,
    /// Feasible JPO2 loadings (core, and at least BO2 welfare for everyone).
    pub jpo2_window: Vec<Interval>,
    pub no_reinsurer: Contract,
    pub game: CoalitionGame,
}

impl Contracts {
    pub fn build(params: &MarketParams, jpo2_t: Option<f64>) -> Result<Self, CommandError> {
        let n = params.n();
        let pareto = pareto::solve_rs(params)?;
        let bo1 = bowley::leader(params)?;
        let bo2 = bowley::leader_single(params)?;
        let jpo1 = pareto::jpo_equal_split(params, &pareto, &bo1.contract())?;
        let game = game::build_game(params)?;
        let target = welfare(params, &bo2.contract())?;
        let jpo2_window = single_loading_feasible_set(params, &pareto, &game, Some(&target))?;
        debug!("JPO2 window: {jpo2_window:?}");
        let jpo2_t = match jpo2_t {
            Some(t) => t,
            None => jpo2_window.first().map(Interval::midpoint).ok_or(CommandError::NoJpo2Window)?,
        };
        let jpo2 = pareto.contract(Vector::filled(n, jpo2_t));
        let a0 = game::no_reinsurer_allocation(params, NoReinsurerFormula::SumInvGamma)?;
        let no_reinsurer = Contract::new(a0, Vector::zeros(n), Vector::zeros(n));
        Ok(Contracts { pareto, bo1, bo2, jpo1, jpo2, jpo2_t, jpo2_window, no_reinsurer, game })
    }

    fn named(&self) -> [(&'static str, Contract); 5] {
        [
            ("JPO1", self.jpo1.clone()),
            ("JPO2", self.jpo2.clone()),
            ("BO1", self.bo1.contract()),
            ("BO2", self.bo2.contract()),
            ("no_reinsurer", self.no_reinsurer.clone()),
        ]
    }

    fn conditions(&self, params: &MarketParams) -> Result<ConditionReport, CommandError> {
        let mut report = ConditionReport::default();
        for (name, c) in self.named() {
            let f = check_feasibility(params, &c)?;
            let mut e = ConditionEntry::weak(
                format!("feasible.{name}"),
                Severity::Required,
                vec![market::FEASIBILITY_TOL - f.zero_conserving_residual, market::FEASIBILITY_TOL * params.mu().norm_inf().max(1.0) - f.fairness_residual],
            );
            if f.ok {
                e.status = Status::Pass;
            }
            report.push(e);
        }
        let w1 = welfare(params, &self.jpo1)?;
        let core1 = game::check_core(&self.game, &w1.as_allocation());
        report.push(core_entry("core.JPO1", Severity::Required, &core1, params.n()));
        let w2 = welfare(params, &self.jpo2)?;
        let core2 = game::check_core(&self.game, &w2.as_allocation());
        let target = welfare(params, &self.bo2.contract())?.as_allocation();
        let dominance: Vec<f64> = w2.as_allocation().iter().zip(&target).map(|(a, b)| a - b).collect();
        report.push(core_entry("core.JPO2", Severity::Advisory, &core2, params.n()).with_note(format!("t = {}", self.jpo2_t)));
        report.push(ConditionEntry::weak("JPO2.dominates_BO2", Severity::Advisory, dominance));
        Ok(report)
    }
}

fn core_entry(name: &str, severity: Severity, c: &game::CoreCheck, n: usize) -> ConditionEntry {
    let mut slacks: Vec<f64> = c.violated.iter().map(|v| v.slack).collect();
    slacks.push(-c.efficiency_gap.abs());
    let mut e = ConditionEntry::from_slacks(name, severity, slacks, |_| true);
    e.status = if c.in_core { Status::Pass } else { Status::Fail };
    if !c.efficient {
        e = e.with_note(format!("efficiency gap {}", c.efficiency_gap));
    }
    for v in &c.violated {
        e = e.with_note(format!("{} short by {}", v.coalition.label(n), -v.slack));
    }
    for i in &c.negative {
        e = e.with_note(format!("agent {} negative", i + 1));
    }
    e
}

fn pareto_cmd(params: &MarketParams) -> Result<RunOutput, CommandError> {
    let n = params.n();
    let sol = pareto::solve_rs(params)?;
    let game = game::build_game(params)?;
    let eta_min = pareto::eta_min(params, &sol.p_star)?;
    let surplus = pareto::risk_surplus(params, &sol.a_star);

    let mut summary = Table::new("pareto_summary", vec!["quantity".into(), "value".into()]);
    summary.push(labelled("k", [sol.k]));
    summary.push(labelled("total_welfare", [game.grand_value()]));
    summary.push(vec!["interior".into(), sol.interior.into()]);
    let header = ["member", "p", "eta_min", "risk_surplus"].map(String::from).to_vec();
    let mut members = Table::new("pareto_members", header);
    for i in 0..n {
        members.push(vec![(i + 1).into(), sol.p_star[i].into(), eta_min[i].into(), surplus[i].into()]);
    }

    let mut conditions = ConditionReport::default();
    conditions.push(pareto::check_unicond2(params)?);
    conditions.push(pareto::check_wgcond(params)?);
    conditions.push(game::check_core_bound(params, &sol, &game)?);
    Ok(RunOutput { tables: vec![summary, members, matrix_table("pareto_A", &sol.a_star)], conditions, document: None })
}

fn bowley_cmd(params: &MarketParams, single: bool) -> Result<RunOutput, CommandError> {
    let n = params.n();
    let b = if single { bowley::leader_single(params)? } else { bowley::leader(params)? };
    let sol = pareto::solve_rs(params)?;
    let cmp = bowley::compare(params, &sol, &b)?;
    let w = welfare(params, &b.contract())?;
    let e = evaluate(params, &b.contract())?;

    let mut summary = Table::new("bowley_summary", vec!["quantity".into(), "value".into()]);
    if let Some(t) = b.single_loading {
        summary.push(labelled("single_loading", [t]));
    }
    if let Some(v) = b.omega_r_closed {
        summary.push(labelled("omega_R_closed_form", [v]));
    }
    summary.push(labelled("omega_R", [b.omega_r_direct]));
    summary.push(labelled("total_welfare", [w.total]));
    summary.push(labelled("welfare_gap_to_pareto", [cmp.total_welfare_gap]));
    summary.push(vec!["bowley_optimal".into(), b.bowley_optimal.into()]);
    summary.push(vec!["bowley_is_jpo".into(), cmp.bowley_is_jpo.into()]);
    let header = ["member", "eta", "p", "premium", "rho", "omega"].map(String::from).to_vec();
    let mut members = Table::new("bowley_members", header);
    for i in 0..n {
        members.push(vec![
            (i + 1).into(),
            b.eta_star[i].into(),
            b.p_star[i].into(),
            e.premiums[i].into(),
            e.rho_members[i].into(),
            w.omega_members[i].into(),
        ]);
    }
    let mut conditions = b.condition_report.clone();
    if !single {
        let k = bowley::appendix_k_bounds(params)?;
        conditions.extend(ConditionReport { entries: k.entries });
    }
    Ok(RunOutput { tables: vec![summary, members, matrix_table("bowley_A", &b.a_star)], conditions, document: None })
}

fn game_cmd(params: &MarketParams) -> Result<RunOutput, CommandError> {
    let n = params.n();
    let g = game::build_game(params)?;
    let mut t = Table::new("game", vec!["mask".into(), "coalition".into(), "value".into()]);
    for (mask, v) in g.values().iter().enumerate() {
        t.push(vec![mask.into(), game::Coalition(mask as u32).label(n).into(), (*v).into()]);
    }
    Ok(RunOutput { tables: vec![t], conditions: ConditionReport::default(), document: Some(g.to_json()) })
}

fn core_check_cmd(params: &MarketParams, alloc: &[f64], radius: &[f64]) -> Result<RunOutput, CommandError> {
    let n = params.n();
    if alloc.len() != n + 1 || radius.len() != n + 1 {
        return Err(CommandError::Allocation(format!("expected {} values (members then reinsurer), got {}", n + 1, alloc.len())));
    }
    let g = game::build_game(params)?;
    let c = game::check_core_within(&g, alloc, radius);
    let mut summary = Table::new("core_check", vec!["quantity".into(), "value".into()]);
    summary.push(vec!["in_core".into(), c.in_core.into()]);
    summary.push(vec!["efficient".into(), c.efficient.into()]);
    summary.push(labelled("efficiency_gap", [c.efficiency_gap]));
    summary.push(labelled("grand_value", [g.grand_value()]));
    let mut violations = Table::new("violations", vec!["coalition".into(), "slack".into()]);
    for v in &c.violated {
        violations.push(vec![v.coalition.label(n).into(), v.slack.into()]);
    }
    let mut conditions = ConditionReport::default();
    let mut e = core_entry("core", Severity::Required, &c, n);
    if radius.iter().any(|&r| r > 0.0) {
        e = e.with_note("values taken as rounded to their last written digit");
    }
    conditions.push(e);
    Ok(RunOutput { tables: vec![summary, violations], conditions, document: None })
}

fn tables_cmd(params: &MarketParams, jpo2_t: Option<f64>) -> Result<RunOutput, CommandError> {
    let n = params.n();
    let c = Contracts::build(params, jpo2_t)?;
    let with_contract = |first: &str, cols: Vec<String>| {
        let mut h = vec![first.to_string()];
        h.extend(cols);
        h
    };

    let mut t1 = Table::new("table1_loadings", with_contract("contract", indexed("eta", n)));
    t1.push(labelled("JPO1", c.jpo1.eta.iter().copied()));
    t1.push(labelled("JPO2", c.jpo2.eta.iter().copied()));
    t1.push(labelled("BO1", c.bo1.eta_star.iter().copied()));
    t1.push(labelled("BO2", c.bo2.eta_star.iter().copied()));

    let mut t2 = Table::new("table2_reinsurance", with_contract("contract", indexed("p", n)));
    t2.push(labelled("JPO1 and JPO2", c.pareto.p_star.iter().copied()));
    t2.push(labelled("BO1", c.bo1.p_star.iter().copied()));
    t2.push(labelled("BO2", c.bo2.p_star.iter().copied()));

    let t3 = [
        matrix_table("table3a_A_JPO", &c.pareto.a_star),
        matrix_table("table3b_A_no_reinsurer", &c.no_reinsurer.a),
        matrix_table("table3c_A_BO1", &c.bo1.a_star),
        matrix_table("table3d_A_BO2", &c.bo2.a_star),
    ];

    let mut h4 = with_contract("contract", indexed("pi", n));
    h4.push("total".into());
    let mut t4 = Table::new("table4_premiums", h4);
    let mut h5 = with_contract("contract", indexed("rho", n));
    h5.push("rho_R".into());
    let mut t5 = Table::new("table5_disutilities", h5);
    let sq = params.status_quo_disutility();
    let mut row = labelled("status_quo", sq.iter().copied());
    row.push(0.0.into());
    t5.push(row);
    let mut h6 = with_contract("contract", indexed("omega", n));
    h6.extend(["omega_R".to_string(), "total".to_string()]);
    let mut t6 = Table::new("table6_welfare", h6);

    for (name, contract) in [
        ("no_reinsurer", &c.no_reinsurer),
        ("JPO1", &c.jpo1),
        ("JPO2", &c.jpo2),
        ("BO1", &c.bo1.contract()),
        ("BO2", &c.bo2.contract()),
    ] {
        let e = evaluate(params, contract)?;
        let w = welfare(params, contract)?;
        let has_r = name != "no_reinsurer";
        if has_r {
            let mut row = labelled(name, e.premiums.iter().copied());
            row.push(e.premiums.sum().into());
            t4.push(row);
        }
        // JPO1 and JPO2 share (A, p), hence disutilities.
        if name != "JPO2" {
            let label = if name == "JPO1" { "JPO1 and JPO2" } else { name };
            let mut row = labelled(label, e.rho_members.iter().copied());
            row.push(if has_r { e.rho_reinsurer.into() } else { Cell::Empty });
            t5.push(row);
        }
        let mut row = labelled(name, w.omega_members.iter().copied());
        row.push(if has_r { w.omega_reinsurer.into() } else { Cell::Empty });
        row.push(w.total.into());
        t6.push(row);
    }

    let mut tables = vec![t1, t2];
    tables.extend(t3);
    tables.extend([t4, t5, t6]);
    let mut conditions = c.conditions(params)?;
    conditions.extend(ConditionReport { entries: prefixed("BO1", &c.bo1.condition_report) });
    conditions.extend(ConditionReport { entries: prefixed("BO2", &c.bo2.condition_report) });
    Ok(RunOutput { tables, conditions, document: None })
}

/// One grid point of the γ_R sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma_r: f64,
    pub p_jpo: Vector,
    pub p_bo1: Vector,
    pub p_bo2: Vector,
    pub total_jpo: f64,
    pub total_bo1: f64,
    pub total_bo2: f64,
}

pub fn sweep_rows(params: &MarketParams, sweep: &SweepConfig) -> Result<Vec<SweepRow>, CommandError> {
    let grid = sweep.grid()?;
    // Indexed collect keeps rows in grid order.
    grid.par_iter()
        .map(|&g| -> Result<SweepRow, CommandError> {
            let m = params.with_gamma_r(g)?;
            let n = m.n();
            let sol = pareto::solve_rs(&m)?;
            let bo1 = bowley::leader(&m)?;
            let bo2 = bowley::leader_single(&m)?;
            Ok(SweepRow {
                gamma_r: g,
                total_jpo: welfare(&m, &sol.contract(Vector::zeros(n)))?.total,
                total_bo1: welfare(&m, &bo1.contract())?.total,
                total_bo2: welfare(&m, &bo2.contract())?.total,
                p_jpo: sol.p_star,
                p_bo1: bo1.p_star,
                p_bo2: bo2.p_star,
            })
        })
        .collect()
}

fn sweep_cmd(params: &MarketParams, sweep: &SweepConfig) -> Result<RunOutput, CommandError> {
    let n = params.n();
    let rows = sweep_rows(params, sweep)?;
    let mut header = vec!["gamma_r".to_string()];
    for c in ["JPO", "BO1", "BO2"] {
        header.extend(indexed(&format!("{c}_p"), n));
    }
    header.extend(["JPO_total", "BO1_total", "BO2_total"].map(String::from));
    let mut t = Table::new("sweep", header);
    for r in &rows {
        let mut row: Vec<Cell> = vec![r.gamma_r.into()];
        for p in [&r.p_jpo, &r.p_bo1, &r.p_bo2] {
            row.extend(p.iter().map(|&v| Cell::Num(v)));
        }
        row.extend([r.total_jpo, r.total_bo1, r.total_bo2].map(Cell::Num));
        t.push(row);
    }
    Ok(RunOutput { tables: vec![t], conditions: ConditionReport::default(), document: None })
}

fn validate_cmd(params: &MarketParams, jpo2_t: Option<f64>) -> Result<RunOutput, CommandError> {
    let mut report = ConditionReport::default();
    let c = Contracts::build(params, jpo2_t)?;
    report.push(pareto::check_unicond2(params)?);
    report.push(pareto::check_wgcond(params)?);
    report.push(game::check_core_bound(params, &c.pareto, &c.game)?);
    report.extend(c.conditions(params)?);
    report.extend(ConditionReport { entries: prefixed("BO1", &c.bo1.condition_report) });
    report.extend(ConditionReport { entries: prefixed("BO2", &c.bo2.condition_report) });
    report.extend(ConditionReport { entries: bowley::appendix_k_bounds(params)?.entries });

    let stab = game::check_stability(params, &c.game, &c.jpo1)?;
    let mut e = ConditionEntry::weak("stable.JPO1", Severity::Required, vec![]);
    e.status = if stab.stable { Status::Pass } else { Status::Fail };
    if let Some(b) = stab.blocking {
        e = e.with_note(format!("blocked by {}", b.label(params.n())));
    }
    report.push(e);

    let windows: Vec<String> = c.jpo2_window.iter().map(|i| format!("[{}, {}]", i.lo, i.hi)).collect();
    let mut e = ConditionEntry::weak("JPO2.window", Severity::Advisory, c.jpo2_window.iter().map(Interval::width).collect());
    if c.jpo2_window.is_empty() {
        e.status = Status::Fail;
    }
    report.push(e.with_note(format!("feasible single loadings: {}", windows.join(" "))));

    let res = game::resolve_no_reinsurer_formula(params)?;
    let mut e = ConditionEntry::weak(
        "no_reinsurer.formula",
        Severity::Advisory,
        vec![game::ORACLE_AGREEMENT_TOL - res.sum_inv_gamma_deviation],
    );
    e = e.with_note(format!(
        "deviation from the QP oracle: sum-of-inverse-gamma form {:e}, cardinality form {:e}",
        res.sum_inv_gamma_deviation, res.cardinality_deviation
    ));
    report.push(e);

    Ok(RunOutput { tables: Vec::new(), conditions: report, document: None })
}
