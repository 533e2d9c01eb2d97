//! Scenario schema and strict TOML loading.
//!
//! Every field is optional; omitted fields take the base-case defaults
//! (five identical CPs, pool 2e5, catalogue 1e5, subscriber cost 1,
//! capacity cost 0.1, cache costs 0.5 on both sides, hit capacity 4,
//! ISP fixed cost 1e5, CP fixed cost 1e4). Elasticity defaults to 1.5.
//! Unknown keys are rejected: scenario files double as test fixtures,
//! so typos must fail loudly.

use super::ScenarioError;
use crate::bargain::BargainConfig;
use crate::model::{CpParams, MarketParams};
use serde::Deserialize;
use std::path::Path;

/// Default price elasticity of demand when a scenario omits it.
pub const DEFAULT_ELASTICITY: f64 = 1.5;

/// Default number of CPs when a scenario lists none.
const DEFAULT_CP_COUNT: usize = 5;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    net_neutrality: Option<bool>,
    cp_count: Option<usize>,
    market: Option<RawMarket>,
    cp_defaults: Option<RawCp>,
    cp: Option<Vec<RawCp>>,
    bargain: Option<RawBargain>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarket {
    fixed_cost: Option<f64>,
    cache_unit_cost: Option<f64>,
    capacity_unit_cost: Option<f64>,
    subscriber_cost: Option<f64>,
    hit_capacity: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCp {
    demand_pool: Option<f64>,
    elasticity: Option<f64>,
    content_size: Option<f64>,
    cache_unit_cost: Option<f64>,
    fixed_cost: Option<f64>,
    /// Pins the capacity increment instead of optimizing it.
    beta: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBargain {
    discount: Option<f64>,
    trials: Option<u64>,
    seed: Option<u64>,
    max_rounds: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    parameter: String,
    values: Vec<f64>,
    outputs: Option<Vec<String>>,
}

/// One CP entry of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioCp {
    pub params: CpParams,
    /// Fixed capacity increment, when the scenario pins one.
    pub beta_pin: Option<f64>,
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Elasticity of every CP.
    Elasticity,
    /// ISP cache unit cost `eta_S`.
    IspCacheUnitCost,
    /// ISP capacity unit cost `eta_beta`.
    IspCapacityUnitCost,
    /// ISP fixed cost `F`.
    IspFixedCost,
}

impl SweepParameter {
    fn parse(name: &str) -> Option<Self> {
        match name {
            "elasticity" | "eps" => Some(Self::Elasticity),
            "eta_S" | "eta_s" | "isp_cache_unit_cost" => Some(Self::IspCacheUnitCost),
            "eta_beta" | "isp_capacity_unit_cost" => Some(Self::IspCapacityUnitCost),
            "F" | "isp_fixed_cost" => Some(Self::IspFixedCost),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Elasticity => "elasticity",
            Self::IspCacheUnitCost => "eta_S",
            Self::IspCapacityUnitCost => "eta_beta",
            Self::IspFixedCost => "F",
        }
    }
}

/// Sections a sweep reports per grid value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOutputs {
    pub design: bool,
    pub game: bool,
    pub payoffs: bool,
    pub bargain: bool,
}

impl Default for SweepOutputs {
    fn default() -> Self {
        Self {
            design: true,
            game: true,
            payoffs: true,
            bargain: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    /// Strictly increasing, nonempty grid.
    pub values: Vec<f64>,
    pub outputs: SweepOutputs,
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub market: MarketParams,
    pub cps: Vec<ScenarioCp>,
    pub net_neutrality: bool,
    pub bargain: Option<BargainConfig>,
    pub sweep: Option<SweepSpec>,
    /// Non-fatal findings from loading (for example a pinned beta
    /// zeroed by net neutrality).
    pub warnings: Vec<String>,
}

fn base_cp() -> CpParams {
    CpParams {
        elasticity: DEFAULT_ELASTICITY,
        ..CpParams::default()
    }
}

/// The scenario obtained from an empty file: base-case market and five
/// identical base-case CPs, capacity increments allowed.
pub fn default_scenario() -> Scenario {
    Scenario {
        id: "default".to_owned(),
        market: MarketParams::default(),
        cps: vec![
            ScenarioCp {
                params: base_cp(),
                beta_pin: None,
            };
            DEFAULT_CP_COUNT
        ],
        net_neutrality: false,
        bargain: None,
        sweep: None,
        warnings: Vec::new(),
    }
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Parses and validates a scenario from TOML text.
pub fn parse_scenario(text: &str, id: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = toml::from_str(text)?;
    let mut warnings = Vec::new();
    let net_neutrality = raw.net_neutrality.unwrap_or(false);

    let m = raw.market.unwrap_or_default();
    let base_market = MarketParams::default();
    let market = MarketParams::new(
        m.fixed_cost.unwrap_or(base_market.isp_fixed_cost),
        m.cache_unit_cost.unwrap_or(base_market.isp_cache_unit_cost),
        m.capacity_unit_cost
            .unwrap_or(base_market.isp_capacity_unit_cost),
        m.subscriber_cost.unwrap_or(base_market.subscriber_cost),
        m.hit_capacity.unwrap_or(base_market.hit_capacity),
    )
    .map_err(|e| invalid("market", e.to_string()))?;

    let defaults = raw.cp_defaults.unwrap_or_default();
    let template = base_cp();
    let resolve = |raw: &RawCp, index: usize| -> Result<ScenarioCp, ScenarioError> {
        let field = |name: &str| format!("cp[{index}].{name}");
        let params = CpParams::new(
            raw.demand_pool
                .or(defaults.demand_pool)
                .unwrap_or(template.demand_pool),
            raw.elasticity
                .or(defaults.elasticity)
                .unwrap_or(template.elasticity),
            raw.content_size
                .or(defaults.content_size)
                .unwrap_or(template.content_size),
            raw.cache_unit_cost
                .or(defaults.cache_unit_cost)
                .unwrap_or(template.cache_unit_cost),
            raw.fixed_cost
                .or(defaults.fixed_cost)
                .unwrap_or(template.fixed_cost),
        )
        .map_err(|e| invalid(field("params"), e.to_string()))?;
        let beta_pin = raw.beta.or(defaults.beta);
        if let Some(beta) = beta_pin {
            if !beta.is_finite() || beta < 0.0 {
                return Err(invalid(field("beta"), "must be nonnegative"));
            }
        }
        Ok(ScenarioCp { params, beta_pin })
    };

    let cps: Vec<ScenarioCp> = match (&raw.cp, raw.cp_count) {
        (Some(_), Some(_)) => {
            return Err(invalid(
                "cp_count",
                "conflicts with explicit [[cp]] entries",
            ))
        }
        (Some(list), None) => {
            if list.is_empty() {
                return Err(invalid("cp", "a scenario needs at least one CP"));
            }
            list.iter()
                .enumerate()
                .map(|(i, raw)| resolve(raw, i + 1))
                .collect::<Result<_, _>>()?
        }
        (None, count) => {
            let count = count.unwrap_or(DEFAULT_CP_COUNT);
            if count == 0 {
                return Err(invalid("cp_count", "a scenario needs at least one CP"));
            }
            let one = resolve(&RawCp::default(), 1)?;
            vec![one; count]
        }
    };

    let mut cps = cps;
    if net_neutrality {
        for (i, cp) in cps.iter_mut().enumerate() {
            if let Some(beta) = cp.beta_pin {
                if beta != 0.0 {
                    warnings.push(format!(
                        "cp[{}].beta = {} ignored: net neutrality forces beta = 0",
                        i + 1,
                        beta
                    ));
                }
                cp.beta_pin = Some(0.0);
            }
        }
    }

    let bargain = match raw.bargain {
        None => None,
        Some(b) => {
            let base = BargainConfig::default();
            Some(
                BargainConfig::new(
                    b.discount.unwrap_or(base.discount),
                    b.trials.unwrap_or(base.trials),
                    b.seed.unwrap_or(base.seed),
                    b.max_rounds.unwrap_or(base.max_rounds),
                )
                .map_err(|e| invalid("bargain", e.to_string()))?,
            )
        }
    };

    let sweep = match raw.sweep {
        None => None,
        Some(s) => {
            let parameter = SweepParameter::parse(&s.parameter).ok_or_else(|| {
                invalid(
                    "sweep.parameter",
                    format!(
                        "unknown parameter {:?}; expected elasticity, eta_S, eta_beta, or F",
                        s.parameter
                    ),
                )
            })?;
            if s.values.is_empty() {
                return Err(invalid("sweep.values", "grid must be nonempty"));
            }
            if s.values.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid("sweep.values", "grid must be strictly increasing"));
            }
            let outputs = match s.outputs {
                None => SweepOutputs::default(),
                Some(names) => {
                    let mut outputs = SweepOutputs {
                        design: false,
                        game: false,
                        payoffs: false,
                        bargain: false,
                    };
                    for name in &names {
                        match name.as_str() {
                            "design" => outputs.design = true,
                            "game" => outputs.game = true,
                            "payoffs" => outputs.payoffs = true,
                            "bargain" => outputs.bargain = true,
                            other => {
                                return Err(invalid(
                                    "sweep.outputs",
                                    format!(
                                    "unknown output {other:?}; expected design, game, payoffs, or bargain"
                                ),
                                ))
                            }
                        }
                    }
                    outputs
                }
            };
            Some(SweepSpec {
                parameter,
                values: s.values,
                outputs,
            })
        }
    };

    Ok(Scenario {
        id: id.to_owned(),
        market,
        cps,
        net_neutrality,
        bargain,
        sweep,
        warnings,
    })
}

/// Loads a scenario file; the scenario id is the file stem.
pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_owned());
    parse_scenario(&text, &id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_yields_base_case_defaults() {
        let s = parse_scenario("", "empty").unwrap();
        assert_eq!(s.cps.len(), 5);
        assert!(!s.net_neutrality);
        let cp = &s.cps[0].params;
        assert_eq!(cp.demand_pool, 2e5);
        assert_eq!(cp.elasticity, 1.5);
        assert_eq!(cp.content_size, 1e5);
        assert_eq!(cp.cache_unit_cost, 0.5);
        assert_eq!(cp.fixed_cost, 1e4);
        assert_eq!(s.market.isp_fixed_cost, 1e5);
        assert_eq!(s.market.isp_cache_unit_cost, 0.5);
        assert_eq!(s.market.isp_capacity_unit_cost, 0.1);
        assert_eq!(s.market.subscriber_cost, 1.0);
        assert_eq!(s.market.hit_capacity, 4.0);
        assert_eq!(s, default_scenario().clone_with_id("empty"));
    }

    #[test]
    fn unknown_keys_fail_loudly() {
        assert!(parse_scenario("unknown = 1", "t").is_err());
        assert!(parse_scenario("[market]\ntypo_cost = 1.0", "t").is_err());
        assert!(parse_scenario("[[cp]]\nelasticty = 1.5", "t").is_err());
    }

    #[test]
    fn sub_unit_elasticity_rejected() {
        let err = parse_scenario("[cp_defaults]\nelasticity = 0.9", "t").unwrap_err();
        assert!(err.to_string().contains("elasticity"));
    }

    #[test]
    fn net_neutrality_zeroes_pinned_beta_with_warning() {
        let s = parse_scenario("net_neutrality = true\n[[cp]]\nbeta = 2.0\n[[cp]]\n", "t").unwrap();
        assert_eq!(s.cps[0].beta_pin, Some(0.0));
        assert_eq!(s.cps[1].beta_pin, None);
        assert_eq!(s.warnings.len(), 1);
        assert!(s.warnings[0].contains("net neutrality"));
    }

    #[test]
    fn cp_count_expands_defaults() {
        let s = parse_scenario("cp_count = 3\n[cp_defaults]\nelasticity = 1.3", "t").unwrap();
        assert_eq!(s.cps.len(), 3);
        assert!(s.cps.iter().all(|c| c.params.elasticity == 1.3));
        assert!(parse_scenario("cp_count = 2\n[[cp]]\n", "t").is_err());
        assert!(parse_scenario("cp_count = 0", "t").is_err());
    }

    #[test]
    fn per_cp_overrides_fall_back_to_defaults() {
        let text = "[cp_defaults]\nelasticity = 1.3\n\n[[cp]]\n[[cp]]\nfixed_cost = 7e4\n";
        let s = parse_scenario(text, "t").unwrap();
        assert_eq!(s.cps.len(), 2);
        assert_eq!(s.cps[0].params.fixed_cost, 1e4);
        assert_eq!(s.cps[1].params.fixed_cost, 7e4);
        assert_eq!(s.cps[1].params.elasticity, 1.3);
    }

    #[test]
    fn sweep_validation() {
        let ok = parse_scenario(
            "[sweep]\nparameter = \"elasticity\"\nvalues = [1.3, 1.5, 2.0]",
            "t",
        )
        .unwrap();
        let sweep = ok.sweep.unwrap();
        assert_eq!(sweep.parameter, SweepParameter::Elasticity);
        assert!(sweep.outputs.design && sweep.outputs.game && sweep.outputs.payoffs);
        assert!(!sweep.outputs.bargain);

        assert!(parse_scenario("[sweep]\nparameter = \"nope\"\nvalues = [1.0]", "t").is_err());
        assert!(parse_scenario("[sweep]\nparameter = \"F\"\nvalues = []", "t").is_err());
        assert!(parse_scenario("[sweep]\nparameter = \"F\"\nvalues = [2.0, 1.0]", "t").is_err());
        assert!(parse_scenario(
            "[sweep]\nparameter = \"F\"\nvalues = [1.0]\noutputs = [\"nope\"]",
            "t"
        )
        .is_err());
    }

    impl Scenario {
        fn clone_with_id(mut self, id: &str) -> Self {
            self.id = id.to_owned();
            self
        }
    }
}
