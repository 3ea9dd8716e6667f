//! Peer-to-peer insurance pools with a reinsurer: Pareto-optimal and
//! leader–follower contract design, welfare accounting, and the induced
//! cooperative game.

pub mod bowley;
pub mod game;
pub mod linalg;
pub mod market;
pub mod oracle;
pub mod pareto;
pub mod report;
pub mod simplex;

pub use bowley::{BowleyError, BowleySolution, FollowerModel};
pub use game::{Coalition, CoalitionGame, GameError};
pub use linalg::{LinalgError, Matrix, Vector};
pub use market::{Contract, MarketError, MarketParams, WelfareReport};
pub use pareto::{ParetoError, ParetoSolution};
pub use report::{ConditionEntry, ConditionReport, Severity, Status};
