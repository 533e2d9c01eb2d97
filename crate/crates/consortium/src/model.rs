//! Demand, quality-of-experience, and profit primitives.
//!
//! A content provider (CP) with a catalogue of size `Sigma` gets a
//! dedicated cache of size `S` at the ISP's last mile. The hit
//! probability follows the logarithmic cache model
//!
//! ```text
//! h = ln(S + 1) / ln(Sigma)
//! ```
//!
//! A request served from the cache sees network capacity `r1`; a miss
//! sees capacity 1 (capacities are expressed in units of the miss
//! capacity). An optional per-subscriber capacity increment `beta`
//! augments the hit capacity, so the average capacity is
//!
//! ```text
//! R = (dr + beta) * h + 1,        dr = r1 - 1
//! ```
//!
//! Demand is constant-elasticity in the subscription price and quality
//! of experience is logarithmic in capacity, giving the product-form
//! subscriber count
//!
//! ```text
//! n = D * Q = (A / p^eps) * ln R
//! ```
//!
//! All quantities are real-valued; every operation here is pure and
//! deterministic, and values are immutable once constructed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Validation failure for a parameter or design field.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} = {value} out of range: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("{0}")]
    Mismatch(&'static str),
}

fn domain(name: &'static str, value: f64, reason: &'static str) -> ModelError {
    ModelError::Domain {
        name,
        value,
        reason,
    }
}

fn require_finite(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(domain(name, value, "must be finite"))
    }
}

/// Network capacity experienced on a cache miss. Capacities are measured
/// in units of this value, so it is pinned at 1.
pub const MISS_CAPACITY: f64 = 1.0;

/// Economic parameters of one content provider.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpParams {
    /// Potential subscriber pool `A`.
    pub demand_pool: f64,
    /// Price elasticity of demand `eps`; must exceed 1 or no interior
    /// price optimum exists.
    pub elasticity: f64,
    /// Catalogue size `Sigma` in cache units; must exceed 1 so that
    /// `ln Sigma > 0`.
    pub content_size: f64,
    /// CP-side cost per installed cache unit `c_S`.
    pub cache_unit_cost: f64,
    /// CP fixed cost `f`.
    pub fixed_cost: f64,
}

impl CpParams {
    pub fn new(
        demand_pool: f64,
        elasticity: f64,
        content_size: f64,
        cache_unit_cost: f64,
        fixed_cost: f64,
    ) -> Result<Self, ModelError> {
        let cp = Self {
            demand_pool,
            elasticity,
            content_size,
            cache_unit_cost,
            fixed_cost,
        };
        cp.validate()?;
        Ok(cp)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        require_finite("demand_pool", self.demand_pool)?;
        require_finite("elasticity", self.elasticity)?;
        require_finite("content_size", self.content_size)?;
        require_finite("cache_unit_cost", self.cache_unit_cost)?;
        require_finite("fixed_cost", self.fixed_cost)?;
        if self.demand_pool <= 0.0 {
            return Err(domain("demand_pool", self.demand_pool, "must be positive"));
        }
        if self.elasticity <= 1.0 {
            return Err(domain("elasticity", self.elasticity, "must exceed 1"));
        }
        if self.content_size <= 1.0 {
            return Err(domain("content_size", self.content_size, "must exceed 1"));
        }
        if self.cache_unit_cost < 0.0 {
            return Err(domain(
                "cache_unit_cost",
                self.cache_unit_cost,
                "must be nonnegative",
            ));
        }
        if self.fixed_cost < 0.0 {
            return Err(domain("fixed_cost", self.fixed_cost, "must be nonnegative"));
        }
        Ok(())
    }
}

impl Default for CpParams {
    /// Base-case content provider: pool 2e5, elasticity 1.5, catalogue
    /// 1e5 cache units, cache cost 0.5, fixed cost 1e4.
    fn default() -> Self {
        Self {
            demand_pool: 2e5,
            elasticity: 1.5,
            content_size: 1e5,
            cache_unit_cost: 0.5,
            fixed_cost: 1e4,
        }
    }
}

/// ISP-side and shared market parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    /// ISP fixed cost `F`, incurred only once a coalition agreement is
    /// in place.
    pub isp_fixed_cost: f64,
    /// ISP cost per cache unit `eta_S`.
    pub isp_cache_unit_cost: f64,
    /// ISP cost per capacity unit per subscriber `eta_beta`.
    pub isp_capacity_unit_cost: f64,
    /// Per-subscriber support cost `c` (billing, authentication, ...),
    /// borne by every CP.
    pub subscriber_cost: f64,
    /// Network capacity on a cache hit, `r1 > 1`, in units of the miss
    /// capacity.
    pub hit_capacity: f64,
}

impl MarketParams {
    pub fn new(
        isp_fixed_cost: f64,
        isp_cache_unit_cost: f64,
        isp_capacity_unit_cost: f64,
        subscriber_cost: f64,
        hit_capacity: f64,
    ) -> Result<Self, ModelError> {
        let mkt = Self {
            isp_fixed_cost,
            isp_cache_unit_cost,
            isp_capacity_unit_cost,
            subscriber_cost,
            hit_capacity,
        };
        mkt.validate()?;
        Ok(mkt)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        require_finite("isp_fixed_cost", self.isp_fixed_cost)?;
        require_finite("isp_cache_unit_cost", self.isp_cache_unit_cost)?;
        require_finite("isp_capacity_unit_cost", self.isp_capacity_unit_cost)?;
        require_finite("subscriber_cost", self.subscriber_cost)?;
        require_finite("hit_capacity", self.hit_capacity)?;
        if self.isp_fixed_cost < 0.0 {
            return Err(domain(
                "isp_fixed_cost",
                self.isp_fixed_cost,
                "must be nonnegative",
            ));
        }
        if self.isp_cache_unit_cost < 0.0 {
            return Err(domain(
                "isp_cache_unit_cost",
                self.isp_cache_unit_cost,
                "must be nonnegative",
            ));
        }
        if self.isp_capacity_unit_cost < 0.0 {
            return Err(domain(
                "isp_capacity_unit_cost",
                self.isp_capacity_unit_cost,
                "must be nonnegative",
            ));
        }
        if self.subscriber_cost <= 0.0 {
            return Err(domain(
                "subscriber_cost",
                self.subscriber_cost,
                "must be positive",
            ));
        }
        if self.hit_capacity <= MISS_CAPACITY {
            return Err(domain(
                "hit_capacity",
                self.hit_capacity,
                "must exceed the miss capacity of 1",
            ));
        }
        Ok(())
    }

    /// Capacity gap `dr = r1 - 1` between a cache hit and a miss.
    pub fn capacity_gap(&self) -> f64 {
        self.hit_capacity - MISS_CAPACITY
    }
}

impl Default for MarketParams {
    /// Base-case market: F = 1e5, eta_S = 0.5, eta_beta = 0.1, c = 1,
    /// r1 = 4.
    fn default() -> Self {
        Self {
            isp_fixed_cost: 1e5,
            isp_cache_unit_cost: 0.5,
            isp_capacity_unit_cost: 0.1,
            subscriber_cost: 1.0,
            hit_capacity: 4.0,
        }
    }
}

/// A (price, capacity increment, cache size) triple for one CP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpDesign {
    /// Subscription price `p` charged to subscribers.
    pub price: f64,
    /// Last-mile capacity increment `beta` per subscriber. Zero whenever
    /// net-neutrality regulation applies.
    pub capacity_increment: f64,
    /// Cache size `S` in `[0, Sigma - 1]`, which keeps the hit
    /// probability inside `[0, 1]`.
    pub cache_size: f64,
}

impl CpDesign {
    pub fn new(price: f64, capacity_increment: f64, cache_size: f64) -> Self {
        Self {
            price,
            capacity_increment,
            cache_size,
        }
    }
}

/// Quantities derived from a design through the subscriber model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedState {
    /// Cache hit probability `h` in `[0, 1]`.
    pub hit_prob: f64,
    /// Average network capacity `R >= 1`.
    pub avg_capacity: f64,
    /// Quality of experience `Q = ln R >= 0`.
    pub qoe: f64,
    /// Price-driven demand `D = A / p^eps`.
    pub demand: f64,
    /// Subscriber count `n = D * Q`.
    pub subscribers: f64,
}

/// Unit prices the ISP charges one CP for cache and capacity under the
/// non-coalitional business model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitPrices {
    /// Price per cache unit `t_S`.
    pub cache_price: f64,
    /// Price per capacity unit per subscriber `t_beta`.
    pub capacity_price: f64,
}

impl UnitPrices {
    pub fn new(cache_price: f64, capacity_price: f64) -> Result<Self, ModelError> {
        if cache_price < 0.0 {
            return Err(domain("cache_price", cache_price, "must be nonnegative"));
        }
        if capacity_price < 0.0 {
            return Err(domain(
                "capacity_price",
                capacity_price,
                "must be nonnegative",
            ));
        }
        Ok(Self {
            cache_price,
            capacity_price,
        })
    }
}

/// Cache hit probability `h = ln(S + 1) / ln(Sigma)`.
///
/// Monotone nondecreasing and concave in the cache size; 0 with no
/// cache, 1 when the whole catalogue is cached (`S = Sigma - 1`).
pub fn hit_probability(cache_size: f64, content_size: f64) -> Result<f64, ModelError> {
    require_finite("cache_size", cache_size)?;
    require_finite("content_size", content_size)?;
    if content_size <= 1.0 {
        return Err(domain("content_size", content_size, "must exceed 1"));
    }
    if cache_size < 0.0 || cache_size > content_size - 1.0 {
        return Err(domain(
            "cache_size",
            cache_size,
            "must lie in [0, content_size - 1]",
        ));
    }
    // ln_1p(Sigma - 1) can round one ulp past ln(Sigma)
    Ok((cache_size.ln_1p() / content_size.ln()).min(1.0))
}

/// Checks a design against the CP it is meant for.
pub fn validate_design(design: &CpDesign, cp: &CpParams) -> Result<(), ModelError> {
    cp.validate()?;
    require_finite("price", design.price)?;
    require_finite("capacity_increment", design.capacity_increment)?;
    require_finite("cache_size", design.cache_size)?;
    if design.price <= 0.0 {
        return Err(domain("price", design.price, "must be positive"));
    }
    if design.capacity_increment < 0.0 {
        return Err(domain(
            "capacity_increment",
            design.capacity_increment,
            "must be nonnegative",
        ));
    }
    if design.cache_size < 0.0 || design.cache_size > cp.content_size - 1.0 {
        return Err(domain(
            "cache_size",
            design.cache_size,
            "must lie in [0, content_size - 1]",
        ));
    }
    Ok(())
}

/// Evaluates the subscriber model at a design.
pub fn subscribers(
    design: &CpDesign,
    cp: &CpParams,
    mkt: &MarketParams,
) -> Result<DerivedState, ModelError> {
    validate_design(design, cp)?;
    mkt.validate()?;
    let hit_prob = hit_probability(design.cache_size, cp.content_size)?;
    // R - 1 = (dr + beta) h; ln_1p keeps precision for small caches.
    let capacity_above_miss = (mkt.capacity_gap() + design.capacity_increment) * hit_prob;
    let avg_capacity = capacity_above_miss + MISS_CAPACITY;
    let qoe = capacity_above_miss.ln_1p();
    let demand = cp.demand_pool / design.price.powf(cp.elasticity);
    Ok(DerivedState {
        hit_prob,
        avg_capacity,
        qoe,
        demand,
        subscribers: demand * qoe,
    })
}

/// One CP's profit under the non-coalitional business model:
/// `(p - c - t_beta * beta) * n - (c_S + t_S) * S - f`.
pub fn cp_profit(
    design: &CpDesign,
    prices: &UnitPrices,
    cp: &CpParams,
    mkt: &MarketParams,
) -> Result<f64, ModelError> {
    let state = subscribers(design, cp, mkt)?;
    let margin =
        design.price - mkt.subscriber_cost - prices.capacity_price * design.capacity_increment;
    Ok(margin * state.subscribers
        - (cp.cache_unit_cost + prices.cache_price) * design.cache_size
        - cp.fixed_cost)
}

/// The ISP's profit under the non-coalitional business model: resale
/// margins on capacity and cache across all CPs, minus the fixed cost.
pub fn isp_profit(
    designs: &[CpDesign],
    prices: &[UnitPrices],
    cps: &[CpParams],
    mkt: &MarketParams,
) -> Result<f64, ModelError> {
    if designs.len() != cps.len() || prices.len() != cps.len() {
        return Err(ModelError::Mismatch(
            "designs, prices, and cps must have equal lengths",
        ));
    }
    let mut total = -mkt.isp_fixed_cost;
    for ((design, price), cp) in designs.iter().zip(prices).zip(cps) {
        let state = subscribers(design, cp, mkt)?;
        total += (price.capacity_price - mkt.isp_capacity_unit_cost)
            * design.capacity_increment
            * state.subscribers
            + (price.cache_price - mkt.isp_cache_unit_cost) * design.cache_size;
    }
    Ok(total)
}

/// Profits of the ISP and of every CP under the non-coalitional model.
///
/// When every cache size is zero there is no agreement: every subscriber
/// count is zero and, since the ISP fixed cost is incurred only once an
/// agreement is reached, all profits are zero.
pub fn noncoalitional_profits(
    designs: &[CpDesign],
    prices: &[UnitPrices],
    cps: &[CpParams],
    mkt: &MarketParams,
) -> Result<(f64, Vec<f64>), ModelError> {
    if designs.len() != cps.len() || prices.len() != cps.len() {
        return Err(ModelError::Mismatch(
            "designs, prices, and cps must have equal lengths",
        ));
    }
    for (design, cp) in designs.iter().zip(cps) {
        validate_design(design, cp)?;
    }
    if designs.iter().all(|d| d.cache_size == 0.0) {
        return Ok((0.0, vec![0.0; cps.len()]));
    }
    let mut cp_profits = Vec::with_capacity(cps.len());
    for ((design, price), cp) in designs.iter().zip(prices).zip(cps) {
        cp_profits.push(cp_profit(design, price, cp, mkt)?);
    }
    Ok((isp_profit(designs, prices, cps, mkt)?, cp_profits))
}

/// Operational profit of the virtual ISP/CP pair at an arbitrary design:
/// `V = (p - c - eta_beta * beta) * n - (c_S + eta_S) * S - f`.
///
/// Transfers between the CP and the ISP cancel here, so for any unit
/// prices the non-coalitional profits satisfy
/// `sum_k pi_k + pi_ISP = sum_k V_k - F`.
pub fn integrated_profit(
    design: &CpDesign,
    cp: &CpParams,
    mkt: &MarketParams,
) -> Result<f64, ModelError> {
    let state = subscribers(design, cp, mkt)?;
    let margin =
        design.price - mkt.subscriber_cost - mkt.isp_capacity_unit_cost * design.capacity_increment;
    Ok(margin * state.subscribers
        - (cp.cache_unit_cost + mkt.isp_cache_unit_cost) * design.cache_size
        - cp.fixed_cost)
}
