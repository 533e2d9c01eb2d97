//! Python bindings for the consortium engine.
//!
//! Exposes the CP/market parameter types, the per-CP design optimizer,
//! the coalitional game with its payoff rules, the bargaining solver and
//! simulator, and a TOML scenario runner.
//!
//! Usage from Python:
//!
//! ```text
//! from consortium_py import CpParams, MarketParams, optimize
//! out = optimize(CpParams(), MarketParams(), net_neutrality=True)
//! print(out.cache_size, out.virtual_profit)
//! ```

use consortium::bargain::{self, BargainConfig};
use consortium::design;
use consortium::game;
use consortium::model;
use consortium::scenario;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Economic parameters of one content provider.
#[pyclass(name = "CpParams", skip_from_py_object)]
#[derive(Clone)]
struct PyCpParams {
    inner: model::CpParams,
}

#[pymethods]
impl PyCpParams {
    #[new]
    #[pyo3(signature = (demand_pool=2e5, elasticity=1.5, content_size=1e5, cache_unit_cost=0.5, fixed_cost=1e4))]
    fn new(
        demand_pool: f64,
        elasticity: f64,
        content_size: f64,
        cache_unit_cost: f64,
        fixed_cost: f64,
    ) -> PyResult<Self> {
        let inner = model::CpParams::new(
            demand_pool,
            elasticity,
            content_size,
            cache_unit_cost,
            fixed_cost,
        )
        .map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn demand_pool(&self) -> f64 {
        self.inner.demand_pool
    }
    #[getter]
    fn elasticity(&self) -> f64 {
        self.inner.elasticity
    }
    #[getter]
    fn content_size(&self) -> f64 {
        self.inner.content_size
    }
    #[getter]
    fn cache_unit_cost(&self) -> f64 {
        self.inner.cache_unit_cost
    }
    #[getter]
    fn fixed_cost(&self) -> f64 {
        self.inner.fixed_cost
    }

    fn __repr__(&self) -> String {
        format!(
            "CpParams(demand_pool={}, elasticity={}, content_size={}, cache_unit_cost={}, fixed_cost={})",
            self.inner.demand_pool,
            self.inner.elasticity,
            self.inner.content_size,
            self.inner.cache_unit_cost,
            self.inner.fixed_cost
        )
    }
}

/// ISP-side and shared market parameters.
#[pyclass(name = "MarketParams", skip_from_py_object)]
#[derive(Clone)]
struct PyMarketParams {
    inner: model::MarketParams,
}

#[pymethods]
impl PyMarketParams {
    #[new]
    #[pyo3(signature = (fixed_cost=1e5, cache_unit_cost=0.5, capacity_unit_cost=0.1, subscriber_cost=1.0, hit_capacity=4.0))]
    fn new(
        fixed_cost: f64,
        cache_unit_cost: f64,
        capacity_unit_cost: f64,
        subscriber_cost: f64,
        hit_capacity: f64,
    ) -> PyResult<Self> {
        let inner = model::MarketParams::new(
            fixed_cost,
            cache_unit_cost,
            capacity_unit_cost,
            subscriber_cost,
            hit_capacity,
        )
        .map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn fixed_cost(&self) -> f64 {
        self.inner.isp_fixed_cost
    }
    #[getter]
    fn cache_unit_cost(&self) -> f64 {
        self.inner.isp_cache_unit_cost
    }
    #[getter]
    fn capacity_unit_cost(&self) -> f64 {
        self.inner.isp_capacity_unit_cost
    }
    #[getter]
    fn subscriber_cost(&self) -> f64 {
        self.inner.subscriber_cost
    }
    #[getter]
    fn hit_capacity(&self) -> f64 {
        self.inner.hit_capacity
    }
}

/// Subscriber-model quantities derived from a design.
#[pyclass(name = "DerivedState", skip_from_py_object)]
#[derive(Clone)]
struct PyDerivedState {
    #[pyo3(get)]
    hit_prob: f64,
    #[pyo3(get)]
    avg_capacity: f64,
    #[pyo3(get)]
    qoe: f64,
    #[pyo3(get)]
    demand: f64,
    #[pyo3(get)]
    subscribers: f64,
}

/// Optimized design for one CP.
#[pyclass(name = "CpOutcome", skip_from_py_object)]
#[derive(Clone)]
struct PyCpOutcome {
    #[pyo3(get)]
    price: f64,
    #[pyo3(get)]
    capacity_increment: f64,
    #[pyo3(get)]
    cache_size: f64,
    #[pyo3(get)]
    virtual_profit: f64,
    #[pyo3(get)]
    profit_coefficient: f64,
    #[pyo3(get)]
    interior_cache: bool,
    #[pyo3(get)]
    interior_beta: bool,
}

impl From<design::CpOutcome> for PyCpOutcome {
    fn from(o: design::CpOutcome) -> Self {
        Self {
            price: o.design.price,
            capacity_increment: o.design.capacity_increment,
            cache_size: o.design.cache_size,
            virtual_profit: o.virtual_profit,
            profit_coefficient: o.profit_coefficient,
            interior_cache: o.interior_cache,
            interior_beta: o.interior_beta,
        }
    }
}

/// Cache hit probability ln(S+1)/ln(Sigma).
#[pyfunction]
fn hit_probability(cache_size: f64, content_size: f64) -> PyResult<f64> {
    model::hit_probability(cache_size, content_size).map_err(value_err)
}

/// Evaluates the subscriber model at a design.
#[pyfunction]
fn subscribers(
    price: f64,
    capacity_increment: f64,
    cache_size: f64,
    cp: &PyCpParams,
    market: &PyMarketParams,
) -> PyResult<PyDerivedState> {
    let state = model::subscribers(
        &model::CpDesign::new(price, capacity_increment, cache_size),
        &cp.inner,
        &market.inner,
    )
    .map_err(value_err)?;
    Ok(PyDerivedState {
        hit_prob: state.hit_prob,
        avg_capacity: state.avg_capacity,
        qoe: state.qoe,
        demand: state.demand,
        subscribers: state.subscribers,
    })
}

/// Profit-maximizing price eps/(eps-1) * (c + eta_beta * beta).
#[pyfunction]
#[pyo3(signature = (elasticity, subscriber_cost, capacity_unit_cost=0.1, beta=0.0))]
fn optimal_price(
    elasticity: f64,
    subscriber_cost: f64,
    capacity_unit_cost: f64,
    beta: f64,
) -> PyResult<f64> {
    design::optimal_price(elasticity, subscriber_cost, capacity_unit_cost, beta).map_err(value_err)
}

/// Jointly optimizes one CP's design; `beta_pin` holds the capacity
/// increment fixed.
#[pyfunction]
#[pyo3(signature = (cp, market, net_neutrality=false, beta_pin=None))]
fn optimize(
    cp: &PyCpParams,
    market: &PyMarketParams,
    net_neutrality: bool,
    beta_pin: Option<f64>,
) -> PyResult<PyCpOutcome> {
    let opts = design::OptimizeOptions {
        beta_pin,
        ..design::OptimizeOptions::default()
    };
    design::optimize_cp_with(&cp.inner, &market.inner, net_neutrality, &opts)
        .map(PyCpOutcome::from)
        .map_err(value_err)
}

fn coalition_from(players: Vec<usize>, game: &game::CoalitionGame) -> PyResult<game::Coalition> {
    for &p in &players {
        if p < 1 || p > game.player_count() {
            return Err(value_err(format!(
                "player {p} out of range 1..={}",
                game.player_count()
            )));
        }
    }
    Ok(game::Coalition::from_players(&players))
}

/// Characteristic-function game of K CPs (players 1..=K) plus the ISP
/// (player K+1).
#[pyclass(name = "CoalitionGame", skip_from_py_object)]
#[derive(Clone)]
struct PyCoalitionGame {
    inner: game::CoalitionGame,
}

#[pymethods]
impl PyCoalitionGame {
    #[new]
    fn new(cp_values: Vec<f64>, fixed_cost: f64) -> PyResult<Self> {
        let inner = game::CoalitionGame::new(cp_values, fixed_cost).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn cp_count(&self) -> usize {
        self.inner.cp_count()
    }

    #[getter]
    fn isp_id(&self) -> usize {
        self.inner.isp_id()
    }

    /// Value of a coalition given as a list of 1-based player ids.
    fn characteristic_value(&self, players: Vec<usize>) -> PyResult<f64> {
        let coalition = coalition_from(players, &self.inner)?;
        Ok(self.inner.characteristic_value(&coalition))
    }

    fn grand_value(&self) -> f64 {
        self.inner.grand_value()
    }

    fn admission_condition(&self) -> bool {
        self.inner.admission_condition()
    }

    /// -> (admitted cp ids, [(removed cp id, reason), ...])
    fn admission_control(&self) -> (Vec<usize>, Vec<(usize, String)>) {
        let report = self.inner.admission_control();
        let removed = report
            .removed
            .iter()
            .map(|r| {
                let reason = match r.reason {
                    game::RemovalReason::Unprofitable => "unprofitable",
                    game::RemovalReason::SmallestContributor => "smallest contributor",
                };
                (r.cp, reason.to_owned())
            })
            .collect();
        (report.admitted, removed)
    }

    fn egalitarian_payoffs(&self) -> PyResult<Vec<f64>> {
        self.inner.egalitarian_payoffs().map_err(value_err)
    }

    fn shapley_closed_form(&self) -> Vec<f64> {
        self.inner.shapley_closed_form()
    }

    fn shapley_bruteforce(&self) -> PyResult<Vec<f64>> {
        self.inner.shapley_bruteforce().map_err(value_err)
    }

    fn sustainability_check(&self, dropouts: Vec<usize>) -> PyResult<bool> {
        self.inner
            .sustainability_check(&dropouts)
            .map_err(value_err)
    }
}

/// Stationary continuation values of a subgame (default: all players).
#[pyfunction]
#[pyo3(signature = (game, discount, players=None))]
fn solve_continuation(
    game: &PyCoalitionGame,
    discount: f64,
    players: Option<Vec<usize>>,
) -> PyResult<Vec<f64>> {
    let coalition = match players {
        Some(p) => coalition_from(p, &game.inner)?,
        None => game.inner.grand_coalition(),
    };
    bargain::solve_continuation(&game.inner, &coalition, discount).map_err(value_err)
}

/// Subgame-efficiency verdict on the full-coalition profile.
#[pyclass(name = "EquilibriumReport", skip_from_py_object)]
#[derive(Clone)]
struct PyEquilibriumReport {
    #[pyo3(get)]
    subgame_efficient: bool,
    #[pyo3(get)]
    percapita_monotone: bool,
    #[pyo3(get)]
    deviation_free: bool,
    #[pyo3(get)]
    continuation: Vec<f64>,
    /// (subgame players, proposer, coalition players, gain) or None.
    #[pyo3(get)]
    witness: Option<(Vec<usize>, usize, Vec<usize>, f64)>,
}

#[pyfunction]
fn verify_subgame_efficiency(
    game: &PyCoalitionGame,
    discount: f64,
) -> PyResult<PyEquilibriumReport> {
    let report = bargain::verify_subgame_efficiency(&game.inner, discount).map_err(value_err)?;
    Ok(PyEquilibriumReport {
        subgame_efficient: report.subgame_efficient,
        percapita_monotone: report.percapita_monotone,
        deviation_free: report.deviation_free,
        continuation: report.continuation,
        witness: report.witness.map(|w| {
            (
                w.subgame.players().collect(),
                w.proposer,
                w.coalition.players().collect(),
                w.gain,
            )
        }),
    })
}

/// Aggregate Monte Carlo output.
#[pyclass(name = "SimulationReport", skip_from_py_object)]
#[derive(Clone)]
struct PySimulationReport {
    #[pyo3(get)]
    trials: u64,
    #[pyo3(get)]
    mean_payoffs: Vec<f64>,
    #[pyo3(get)]
    std_errors: Vec<f64>,
    #[pyo3(get)]
    agreement_rate: f64,
    #[pyo3(get)]
    mean_agreement_round: f64,
    #[pyo3(get)]
    efficient_regime: bool,
    #[pyo3(get)]
    note: String,
}

/// Seeded Monte Carlo negotiation under the stationary profile.
#[pyfunction]
#[pyo3(signature = (game, discount=0.99, trials=10_000, seed=42, max_rounds=1_000))]
fn simulate(
    game: &PyCoalitionGame,
    discount: f64,
    trials: u64,
    seed: u64,
    max_rounds: u32,
) -> PyResult<PySimulationReport> {
    let config = BargainConfig::new(discount, trials, seed, max_rounds).map_err(value_err)?;
    let report = bargain::simulate(&game.inner, &config).map_err(runtime_err)?;
    Ok(PySimulationReport {
        trials: report.trials,
        mean_payoffs: report.mean_payoffs,
        std_errors: report.std_errors,
        agreement_rate: report.agreement_rate,
        mean_agreement_round: report.mean_agreement_round,
        efficient_regime: report.efficient_regime,
        note: report.note.to_owned(),
    })
}

/// Pipeline summary for one scenario.
#[pyclass(name = "PipelineSummary", skip_from_py_object)]
#[derive(Clone)]
struct PyPipelineSummary {
    #[pyo3(get)]
    scenario_id: String,
    #[pyo3(get)]
    net_neutrality: bool,
    #[pyo3(get)]
    outcomes: Vec<PyCpOutcome>,
    #[pyo3(get)]
    full_value: f64,
    #[pyo3(get)]
    full_admission: bool,
    #[pyo3(get)]
    admitted: Vec<usize>,
    #[pyo3(get)]
    egalitarian_share: Option<f64>,
    #[pyo3(get)]
    transfers: Vec<f64>,
    #[pyo3(get)]
    report_csv: String,
    #[pyo3(get)]
    report_text: String,
}

/// Parses a TOML scenario and runs the full pipeline.
#[pyfunction]
#[pyo3(signature = (toml_text, net_neutrality=None, scenario_id="python"))]
fn run_scenario(
    toml_text: &str,
    net_neutrality: Option<bool>,
    scenario_id: &str,
) -> PyResult<PyPipelineSummary> {
    let mut s = scenario::parse_scenario(toml_text, scenario_id).map_err(value_err)?;
    if let Some(nn) = net_neutrality {
        s.net_neutrality = nn;
    }
    let report = scenario::run_pipeline(&s).map_err(|e| match e.exit_code() {
        2 => runtime_err(e),
        _ => value_err(e),
    })?;
    Ok(PyPipelineSummary {
        scenario_id: report.scenario_id.clone(),
        net_neutrality: report.net_neutrality,
        outcomes: report
            .cps
            .iter()
            .map(|c| PyCpOutcome::from(c.outcome.clone()))
            .collect(),
        full_value: report.full_value,
        full_admission: report.full_admission,
        admitted: report
            .payoffs
            .as_ref()
            .map(|p| p.admitted.clone())
            .unwrap_or_default(),
        egalitarian_share: report.payoffs.as_ref().map(|p| p.egalitarian_share),
        transfers: report
            .payoffs
            .as_ref()
            .map(|p| p.transfers.clone())
            .unwrap_or_default(),
        report_csv: scenario::report_csv(&[&report]),
        report_text: scenario::render_text(&report),
    })
}

#[pymodule]
fn consortium_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCpParams>()?;
    m.add_class::<PyMarketParams>()?;
    m.add_class::<PyDerivedState>()?;
    m.add_class::<PyCpOutcome>()?;
    m.add_class::<PyCoalitionGame>()?;
    m.add_class::<PyEquilibriumReport>()?;
    m.add_class::<PySimulationReport>()?;
    m.add_class::<PyPipelineSummary>()?;
    m.add_function(wrap_pyfunction!(hit_probability, m)?)?;
    m.add_function(wrap_pyfunction!(subscribers, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_price, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(solve_continuation, m)?)?;
    m.add_function(wrap_pyfunction!(verify_subgame_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
