//! The two-step pipeline: design optimization, then coalition admission
//! control with payoffs, settlements, and optional bargaining on the
//! admitted set.

use super::config::{Scenario, ScenarioCp};
use super::ScenarioError;
use crate::bargain::{simulate, verify_subgame_efficiency, EquilibriumReport, SimulationReport};
use crate::design::{optimize_cp_with, CpOutcome, OptimizeOptions};
use crate::game::{settlements, CoalitionGame, RemovalReason};
use crate::model::{subscribers, DerivedState};

/// Design and game standing of one CP.
#[derive(Debug, Clone, PartialEq)]
pub struct CpReport {
    /// 1-based CP id matching the scenario order.
    pub index: usize,
    pub outcome: CpOutcome,
    pub state: DerivedState,
    pub admitted: bool,
    /// Why the CP was denied, when it was.
    pub removal: Option<RemovalReason>,
}

/// Payoffs of the admitted coalition.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffSection {
    /// Admitted CP ids, ascending.
    pub admitted: Vec<usize>,
    /// Value of the admitted grand coalition.
    pub coalition_value: f64,
    /// Equal split per player (one scalar; every member receives it).
    pub egalitarian_share: f64,
    /// Shapley payoff per admitted CP, in `admitted` order.
    pub shapley_cps: Vec<f64>,
    /// Shapley payoff of the ISP.
    pub shapley_isp: f64,
    /// Settlement transfer per admitted CP, in `admitted` order.
    pub transfers: Vec<f64>,
    /// Residual of the ISP settlement identity (relative).
    pub isp_residual: f64,
}

/// Bargaining results on the admitted set.
#[derive(Debug, Clone, PartialEq)]
pub struct BargainSection {
    pub equilibrium: EquilibriumReport,
    pub simulation: SimulationReport,
}

/// Everything the pipeline produces for one scenario evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub scenario_id: String,
    pub net_neutrality: bool,
    /// `(parameter name, value)` when this report is one sweep point.
    pub sweep_key: Option<(String, f64)>,
    pub cps: Vec<CpReport>,
    /// Grand-coalition value over all CPs, before admission control.
    pub full_value: f64,
    /// Admission condition of the full CP set.
    pub full_admission: bool,
    /// Populated unless no CP was admitted.
    pub payoffs: Option<PayoffSection>,
    pub bargain: Option<BargainSection>,
    pub warnings: Vec<String>,
}

/// Runs design optimization, admission control, payoffs, settlements,
/// and (when configured) bargaining for one scenario.
pub fn run_pipeline(scenario: &Scenario) -> Result<PipelineReport, ScenarioError> {
    let mkt = &scenario.market;

    let mut cps = Vec::with_capacity(scenario.cps.len());
    for (i, ScenarioCp { params, beta_pin }) in scenario.cps.iter().enumerate() {
        let opts = OptimizeOptions {
            beta_pin: *beta_pin,
            ..OptimizeOptions::default()
        };
        let outcome =
            optimize_cp_with(params, mkt, scenario.net_neutrality, &opts).map_err(|source| {
                ScenarioError::Cp {
                    index: i + 1,
                    source,
                }
            })?;
        let state = subscribers(&outcome.design, params, mkt)?;
        cps.push(CpReport {
            index: i + 1,
            outcome,
            state,
            admitted: false,
            removal: None,
        });
    }

    let game = CoalitionGame::from_outcomes(
        &cps.iter().map(|c| c.outcome.clone()).collect::<Vec<_>>(),
        mkt.isp_fixed_cost,
    )?;
    let full_value = game.grand_value();
    let full_admission = game.admission_condition();

    let admission = game.admission_control();
    for removal in &admission.removed {
        cps[removal.cp - 1].removal = Some(removal.reason);
    }
    for &cp in &admission.admitted {
        cps[cp - 1].admitted = true;
    }

    let mut payoffs = None;
    let mut bargain = None;
    if !admission.admitted.is_empty() {
        let admitted_game = game.reduced(&admission.admitted)?;
        let admitted_outcomes: Vec<CpOutcome> = admission
            .admitted
            .iter()
            .map(|&cp| cps[cp - 1].outcome.clone())
            .collect();
        let admitted_params: Vec<_> = admission
            .admitted
            .iter()
            .map(|&cp| scenario.cps[cp - 1].params)
            .collect();

        let settlement = settlements(&admitted_game, &admitted_outcomes, &admitted_params, mkt)?;
        let shapley = admitted_game.shapley()?;
        let (shapley_cps, shapley_isp) = {
            let (cps_part, isp_part) = shapley.split_at(shapley.len() - 1);
            (cps_part.to_vec(), isp_part[0])
        };
        payoffs = Some(PayoffSection {
            admitted: admission.admitted.clone(),
            coalition_value: admitted_game.grand_value(),
            egalitarian_share: settlement.egalitarian[0],
            shapley_cps,
            shapley_isp,
            transfers: settlement.transfers,
            isp_residual: settlement.isp_residual,
        });

        if let Some(config) = &scenario.bargain {
            let equilibrium = verify_subgame_efficiency(&admitted_game, config.discount)?;
            let simulation = simulate(&admitted_game, config)?;
            bargain = Some(BargainSection {
                equilibrium,
                simulation,
            });
        }
    }

    Ok(PipelineReport {
        scenario_id: scenario.id.clone(),
        net_neutrality: scenario.net_neutrality,
        sweep_key: None,
        cps,
        full_value,
        full_admission,
        payoffs,
        bargain,
        warnings: scenario.warnings.clone(),
    })
}
