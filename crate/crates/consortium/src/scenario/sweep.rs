//! Parameter sweeps over the pipeline.

use super::config::{Scenario, SweepParameter};
use super::pipeline::{run_pipeline, PipelineReport};
use super::ScenarioError;
use rayon::prelude::*;

/// One grid value's result; per-point failures are data, not errors.
#[derive(Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub report: Result<PipelineReport, String>,
}

fn apply(scenario: &Scenario, parameter: SweepParameter, value: f64) -> Scenario {
    let mut s = scenario.clone();
    s.sweep = None;
    match parameter {
        SweepParameter::Elasticity => {
            for cp in &mut s.cps {
                cp.params.elasticity = value;
            }
        }
        SweepParameter::IspCacheUnitCost => s.market.isp_cache_unit_cost = value,
        SweepParameter::IspCapacityUnitCost => s.market.isp_capacity_unit_cost = value,
        SweepParameter::IspFixedCost => s.market.isp_fixed_cost = value,
    }
    s
}

/// Evaluates the pipeline at every grid value of the scenario's sweep.
/// Points run concurrently; output order follows the grid.
pub fn run_sweep(scenario: &Scenario) -> Result<Vec<SweepPoint>, ScenarioError> {
    let spec = scenario.sweep.as_ref().ok_or(ScenarioError::NoSweep)?;
    let points: Vec<SweepPoint> = spec
        .values
        .par_iter()
        .map(|&value| {
            let scenario = apply(scenario, spec.parameter, value);
            let report = run_pipeline(&scenario)
                .map(|mut r| {
                    r.sweep_key = Some((spec.parameter.name().to_owned(), value));
                    r
                })
                .map_err(|e| e.to_string());
            SweepPoint { value, report }
        })
        .collect();
    Ok(points)
}
