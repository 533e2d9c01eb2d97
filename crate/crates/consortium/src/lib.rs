//! Profit-optimal design and coalition formation for consortiums of one
//! broadband ISP and multiple content providers.
//!
//! The pipeline runs in three stages:
//!
//! 1. **Design optimization** ([`design`]): for each content provider,
//!    choose the subscription price, last-mile capacity increment, and
//!    cache size that maximize the operational profit of the virtual
//!    ISP/CP pair. The price optimum is closed form; the cache optimum is
//!    the unique root of a monotone first-order condition; capacity
//!    increments are found from a stationarity function whose sign tracks
//!    the profit gradient.
//! 2. **Coalition formation** ([`game`]): the optimized per-CP profits
//!    define a characteristic-function game in which any coalition
//!    containing the ISP is worth the sum of its members' profits minus
//!    the shared fixed cost. Admission control enforces the bound on
//!    subsidies from large to small contributors that is necessary and
//!    sufficient for the grand coalition to form; payoffs are the
//!    egalitarian split, with Shapley values and explicit CP-to-ISP
//!    settlements computed for comparison.
//! 3. **Bargaining** ([`bargain`]): a random-proposer negotiation
//!    protocol with per-round discounting. The stationary equilibrium
//!    continuation values are solved exactly, subgame efficiency is
//!    verified by exhaustive one-shot-deviation checks, and a seeded
//!    Monte Carlo simulator replays the protocol.
//!
//! [`scenario`] ties the stages together behind TOML scenario files, a
//! CLI, parameter sweeps, and CSV reports, and can reproduce the
//! reference design tables for the net-neutral (capacity increments
//! forbidden) and unrestricted regimes.

pub mod bargain;
pub mod design;
pub mod game;
pub mod model;
pub mod scenario;

pub use bargain::{BargainConfig, EquilibriumReport, SimulationReport};
pub use design::{optimize_cp, CpOutcome};
pub use game::{Coalition, CoalitionGame};
pub use model::{CpDesign, CpParams, DerivedState, MarketParams, UnitPrices};
pub use scenario::{load_scenario, run_pipeline, Scenario};
