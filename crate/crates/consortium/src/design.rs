//! Per-CP profit maximization.
//!
//! Substituting the closed-form price optimum
//!
//! ```text
//! p* = eps/(eps - 1) * (c + eta_beta * beta)
//! ```
//!
//! into the virtual-consortium profit leaves a two-variable problem
//!
//! ```text
//! V(beta, S) = a(beta) * ln R(beta, S) - (c_S + eta_S) * S - f
//! a(beta)    = (eps-1)^(eps-1)/eps^eps * A / (c + eta_beta*beta)^(eps-1)
//! ```
//!
//! `V` is concave in `S`: its partial derivative
//!
//! ```text
//! dV/dS = a * (dr + beta) / (ln Sigma * R * (S + 1)) - (c_S + eta_S)
//! ```
//!
//! decreases strictly in `S`, so the cache optimum is either 0 (when the
//! derivative at 0 is already nonpositive) or the unique root of the
//! first-order condition, found by bisection. In `beta` the gradient
//! factorizes as `dV/dbeta = psi(beta, S) * a(beta) * ln R` with
//!
//! ```text
//! psi = h / (R ln R) - (eps - 1) * eta_beta / (c + eta_beta * beta)
//! ```
//!
//! so stationary candidates are roots of `psi`; they are scanned on a
//! geometric grid, bracketed, bisected, and compared by profit. The
//! joint optimum alternates the two coordinate solvers and cross-checks
//! the result against a coarse two-dimensional grid.

use crate::model::{CpParams, MarketParams, ModelError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error(transparent)]
    Model(#[from] ModelError),
    /// With a zero capacity unit cost and capacity increments allowed,
    /// profit grows without bound in beta: the stationarity function
    /// never crosses zero.
    #[error("capacity unit cost is zero while capacity increments are allowed: profit is unbounded in beta")]
    UnboundedProfit,
    /// Alternating optimization did not meet tolerance; the best iterate
    /// found so far is attached.
    #[error("joint optimization did not converge within {iterations} iterations")]
    NonConvergence {
        iterations: u32,
        best: Box<CpOutcome>,
    },
}

/// Optimized design for one CP together with its profit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct CpOutcome {
    pub design: crate::model::CpDesign,
    /// Maximized virtual profit `v = V(beta*, S*)`.
    pub virtual_profit: f64,
    /// Fee coefficient `a(beta*)`.
    pub profit_coefficient: f64,
    /// Whether the cache first-order condition held with a positive
    /// optimum (otherwise `S* = 0`).
    pub interior_cache: bool,
    /// Whether a positive stationary capacity increment was selected.
    pub interior_beta: bool,
    /// Whether the cache optimum hit the `Sigma - 1` boundary.
    pub cache_at_boundary: bool,
}

impl CpOutcome {
    pub fn is_profitable(&self) -> bool {
        self.virtual_profit > 0.0
    }
}

/// Cache-coordinate solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheSolution {
    pub cache_size: f64,
    /// True when the first-order condition admitted a positive root.
    pub interior: bool,
    /// True when the root was clipped at the full catalogue `Sigma - 1`.
    pub at_boundary: bool,
}

/// Capacity-coordinate solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSolution {
    pub capacity_increment: f64,
    /// True when a positive stationary point won the profit comparison.
    pub interior: bool,
}

/// Knobs for the joint optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    /// Search cap for capacity increments.
    pub beta_max: f64,
    /// Relative tolerance on both coordinates for the alternating loop.
    pub rel_tol: f64,
    /// Iteration cap for the alternating loop.
    pub max_iterations: u32,
    /// Points per axis of the cross-check grid.
    pub grid_points: usize,
    /// Smallest positive cache size on the cross-check grid. Designs
    /// below one cache unit are finer than the cache model resolves, so
    /// the grid starts at 1; the coordinate solvers remain continuous.
    pub grid_cache_floor: f64,
    /// Smallest positive capacity increment on the cross-check grid.
    pub grid_beta_floor: f64,
    /// Hold beta fixed at this value instead of optimizing it.
    pub beta_pin: Option<f64>,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            beta_max: 1e4,
            rel_tol: 1e-8,
            max_iterations: 200,
            grid_points: 48,
            grid_cache_floor: 1.0,
            grid_beta_floor: 1e-3,
            beta_pin: None,
        }
    }
}

/// Profit-maximizing subscription price
/// `p* = eps/(eps-1) * (c + eta_beta * beta)`, a strict markup over the
/// marginal subscriber cost.
pub fn optimal_price(
    elasticity: f64,
    subscriber_cost: f64,
    capacity_unit_cost: f64,
    beta: f64,
) -> Result<f64, DesignError> {
    if !elasticity.is_finite() || elasticity <= 1.0 {
        return Err(ModelError::Domain {
            name: "elasticity",
            value: elasticity,
            reason: "must exceed 1 for an interior price optimum",
        }
        .into());
    }
    Ok(elasticity / (elasticity - 1.0) * (subscriber_cost + capacity_unit_cost * beta))
}

/// Fee coefficient
/// `a(beta) = (eps-1)^(eps-1)/eps^eps * A / (c + eta_beta*beta)^(eps-1)`:
/// the subscriber-fee profit per unit of QoE after per-subscriber costs.
pub fn profit_coefficient(beta: f64, cp: &CpParams, mkt: &MarketParams) -> f64 {
    let eps = cp.elasticity;
    let markup = (eps - 1.0).powf(eps - 1.0) / eps.powf(eps);
    let marginal_cost = mkt.subscriber_cost + mkt.isp_capacity_unit_cost * beta;
    markup * cp.demand_pool / marginal_cost.powf(eps - 1.0)
}

fn combined_cache_cost(cp: &CpParams, mkt: &MarketParams) -> f64 {
    cp.cache_unit_cost + mkt.isp_cache_unit_cost
}

/// `R - 1 = (dr + beta) * h` with the hit probability clamped to 1.
fn capacity_above_miss(beta: f64, cache: f64, cp: &CpParams, mkt: &MarketParams) -> f64 {
    (mkt.capacity_gap() + beta) * (cache.ln_1p() / cp.content_size.ln()).min(1.0)
}

/// Virtual profit at the price optimum and its fee coefficient:
/// `(V(beta, S), a(beta))`.
pub fn virtual_profit(
    beta: f64,
    cache: f64,
    cp: &CpParams,
    mkt: &MarketParams,
) -> Result<(f64, f64), DesignError> {
    cp.validate()?;
    mkt.validate()?;
    if !beta.is_finite() || beta < 0.0 {
        return Err(ModelError::Domain {
            name: "beta",
            value: beta,
            reason: "must be nonnegative",
        }
        .into());
    }
    if !cache.is_finite() || cache < 0.0 || cache > cp.content_size - 1.0 {
        return Err(ModelError::Domain {
            name: "cache_size",
            value: cache,
            reason: "must lie in [0, content_size - 1]",
        }
        .into());
    }
    let a = profit_coefficient(beta, cp, mkt);
    let qoe = capacity_above_miss(beta, cache, cp, mkt).ln_1p();
    Ok((
        a * qoe - combined_cache_cost(cp, mkt) * cache - cp.fixed_cost,
        a,
    ))
}

/// Partial derivative of the virtual profit in the cache size,
/// `a (dr+beta) / (ln Sigma * R * (S+1)) - (c_S + eta_S)`.
pub fn cache_gradient(beta: f64, cache: f64, cp: &CpParams, mkt: &MarketParams) -> f64 {
    let a = profit_coefficient(beta, cp, mkt);
    let log_sigma = cp.content_size.ln();
    let r = capacity_above_miss(beta, cache, cp, mkt) + 1.0;
    a * (mkt.capacity_gap() + beta) / (log_sigma * r * (cache + 1.0)) - combined_cache_cost(cp, mkt)
}

/// Whether the cache first-order condition admits a positive root:
/// the marginal profit of caching at `S = 0` strictly exceeds the
/// combined unit cost, i.e. `c_S + eta_S < a (dr+beta) / ln Sigma`.
pub fn cache_interior(beta: f64, cp: &CpParams, mkt: &MarketParams) -> bool {
    let a = profit_coefficient(beta, cp, mkt);
    combined_cache_cost(cp, mkt) < a * (mkt.capacity_gap() + beta) / cp.content_size.ln()
}

/// Absolute bisection tolerance on solver arguments.
const ROOT_TOL: f64 = 1e-10;

/// Profit-maximizing cache size for a fixed capacity increment.
///
/// Concavity makes the gradient strictly decreasing, so when it is
/// positive at `S = 0` there is a unique root in `(0, Sigma - 1]`;
/// otherwise the optimum is `S = 0`. A root pushed past the catalogue
/// boundary is clipped and flagged.
pub fn cache_optimum(
    beta: f64,
    cp: &CpParams,
    mkt: &MarketParams,
) -> Result<CacheSolution, DesignError> {
    cp.validate()?;
    mkt.validate()?;
    if !beta.is_finite() || beta < 0.0 {
        return Err(ModelError::Domain {
            name: "beta",
            value: beta,
            reason: "must be nonnegative",
        }
        .into());
    }
    if !cache_interior(beta, cp, mkt) {
        return Ok(CacheSolution {
            cache_size: 0.0,
            interior: false,
            at_boundary: false,
        });
    }
    let hi = cp.content_size - 1.0;
    if cache_gradient(beta, hi, cp, mkt) >= 0.0 {
        return Ok(CacheSolution {
            cache_size: hi,
            interior: true,
            at_boundary: true,
        });
    }
    let mut lo = 0.0;
    let mut hi = hi;
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval below f64 resolution
        }
        if cache_gradient(beta, mid, cp, mkt) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CacheSolution {
        cache_size: 0.5 * (lo + hi),
        interior: true,
        at_boundary: false,
    })
}

/// Stationarity function for the capacity increment,
/// `psi = h / (R ln R) - (eps-1) * eta_beta / (c + eta_beta * beta)`.
///
/// Shares the sign of `dV/dbeta` wherever `a ln R > 0`. At `S = 0` it is
/// defined by its continuous limit `1/(dr + beta) - ...`.
pub fn capacity_stationarity(beta: f64, cache: f64, cp: &CpParams, mkt: &MarketParams) -> f64 {
    let price_term = (cp.elasticity - 1.0) * mkt.isp_capacity_unit_cost
        / (mkt.subscriber_cost + mkt.isp_capacity_unit_cost * beta);
    if cache == 0.0 {
        return 1.0 / (mkt.capacity_gap() + beta) - price_term;
    }
    let h = cache.ln_1p() / cp.content_size.ln();
    let above = (mkt.capacity_gap() + beta) * h;
    let r = above + 1.0;
    h / (r * above.ln_1p()) - price_term
}

/// Partial derivative of the virtual profit in the capacity increment,
/// `psi(beta, S) * a(beta) * ln R`.
pub fn capacity_gradient(beta: f64, cache: f64, cp: &CpParams, mkt: &MarketParams) -> f64 {
    if cache == 0.0 {
        return 0.0; // no cache, no QoE: V does not depend on beta
    }
    let a = profit_coefficient(beta, cp, mkt);
    let qoe = capacity_above_miss(beta, cache, cp, mkt).ln_1p();
    capacity_stationarity(beta, cache, cp, mkt) * a * qoe
}

/// Profit-maximizing capacity increment for a fixed cache size.
///
/// Scans `psi` on a geometric grid over `(0, beta_max]`, brackets every
/// sign change, bisects each bracket, and returns the candidate with the
/// largest profit; `beta = 0` always competes, and so does `beta_max`
/// when the profit is still rising there. Under net neutrality the
/// increment is forced to 0 without a search.
pub fn beta_stationary(
    cache: f64,
    cp: &CpParams,
    mkt: &MarketParams,
    beta_max: f64,
    net_neutrality: bool,
) -> Result<BetaSolution, DesignError> {
    cp.validate()?;
    mkt.validate()?;
    if net_neutrality {
        return Ok(BetaSolution {
            capacity_increment: 0.0,
            interior: false,
        });
    }
    if !beta_max.is_finite() || beta_max <= 0.0 {
        return Err(ModelError::Domain {
            name: "beta_max",
            value: beta_max,
            reason: "must be positive",
        }
        .into());
    }
    if cache == 0.0 {
        // V is flat in beta without a cache.
        return Ok(BetaSolution {
            capacity_increment: 0.0,
            interior: false,
        });
    }
    if mkt.isp_capacity_unit_cost == 0.0 {
        return Err(DesignError::UnboundedProfit);
    }

    const GRID: usize = 512;
    let lo_exp = (1e-8f64).ln();
    let hi_exp = beta_max.ln();
    let node = |i: usize| -> f64 {
        if i == 0 {
            0.0
        } else {
            (lo_exp + (hi_exp - lo_exp) * (i - 1) as f64 / (GRID - 1) as f64).exp()
        }
    };

    let value = |beta: f64| -> f64 {
        let a = profit_coefficient(beta, cp, mkt);
        a * capacity_above_miss(beta, cache, cp, mkt).ln_1p()
    };

    // (beta, profit, came from a bracketed root)
    let mut best = (0.0, value(0.0), false);
    let consider = |beta: f64, is_root: bool, best: &mut (f64, f64, bool)| {
        let v = value(beta);
        if v > best.1 {
            *best = (beta, v, is_root);
        }
    };

    let mut prev = node(0);
    let mut prev_psi = capacity_stationarity(prev, cache, cp, mkt);
    for i in 1..=GRID {
        let cur = node(i);
        let cur_psi = capacity_stationarity(cur, cache, cp, mkt);
        if prev_psi == 0.0 {
            consider(prev, true, &mut best);
        } else if prev_psi * cur_psi < 0.0 {
            // bracketed root: bisect
            let (mut lo, mut hi) = (prev, cur);
            let mut lo_psi = prev_psi;
            while hi - lo > ROOT_TOL {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let mid_psi = capacity_stationarity(mid, cache, cp, mkt);
                if mid_psi == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (mid_psi > 0.0) == (lo_psi > 0.0) {
                    lo = mid;
                    lo_psi = mid_psi;
                } else {
                    hi = mid;
                }
            }
            consider(0.5 * (lo + hi), true, &mut best);
        }
        prev = cur;
        prev_psi = cur_psi;
    }
    if prev_psi > 0.0 {
        // profit still rising at the cap
        consider(beta_max, false, &mut best);
    }

    Ok(BetaSolution {
        capacity_increment: best.0,
        interior: best.2 && best.0 > 0.0,
    })
}

/// Jointly optimizes one CP's design with default options.
pub fn optimize_cp(
    cp: &CpParams,
    mkt: &MarketParams,
    net_neutrality: bool,
) -> Result<CpOutcome, DesignError> {
    optimize_cp_with(cp, mkt, net_neutrality, &OptimizeOptions::default())
}

fn outcome_at(
    beta: f64,
    cache: CacheSolution,
    interior_beta: bool,
    cp: &CpParams,
    mkt: &MarketParams,
) -> Result<CpOutcome, DesignError> {
    let price = optimal_price(
        cp.elasticity,
        mkt.subscriber_cost,
        mkt.isp_capacity_unit_cost,
        beta,
    )?;
    let (v, a) = virtual_profit(beta, cache.cache_size, cp, mkt)?;
    Ok(CpOutcome {
        design: crate::model::CpDesign::new(price, beta, cache.cache_size),
        virtual_profit: v,
        profit_coefficient: a,
        interior_cache: cache.interior,
        interior_beta,
        cache_at_boundary: cache.at_boundary,
    })
}

/// Jointly optimizes one CP's design.
///
/// Under net neutrality (or with beta pinned) only the cache coordinate
/// is optimized. Otherwise the two coordinate solvers alternate from
/// `(beta, S) = (0, 0)` until both moves fall below the relative
/// tolerance, and the result is cross-checked against a coarse
/// log-spaced grid; if the grid finds a better basin, the alternation
/// is restarted from it and the better profit wins. Identical inputs
/// produce bit-identical outputs.
pub fn optimize_cp_with(
    cp: &CpParams,
    mkt: &MarketParams,
    net_neutrality: bool,
    opts: &OptimizeOptions,
) -> Result<CpOutcome, DesignError> {
    cp.validate()?;
    mkt.validate()?;

    let pinned = if net_neutrality {
        Some(0.0)
    } else {
        opts.beta_pin
    };
    if let Some(beta) = pinned {
        if !beta.is_finite() || beta < 0.0 {
            return Err(ModelError::Domain {
                name: "beta",
                value: beta,
                reason: "must be nonnegative",
            }
            .into());
        }
        let cache = cache_optimum(beta, cp, mkt)?;
        return outcome_at(beta, cache, false, cp, mkt);
    }
    if mkt.isp_capacity_unit_cost == 0.0 {
        return Err(DesignError::UnboundedProfit);
    }

    let alternate = |beta0: f64| -> Result<(f64, CacheSolution, bool, bool), DesignError> {
        let mut beta = beta0;
        let mut cache = cache_optimum(beta, cp, mkt)?;
        let mut interior_beta = false;
        for _ in 0..opts.max_iterations {
            if cache.cache_size == 0.0 {
                // no cache: profit is flat in beta, settle at zero
                return Ok((0.0, cache, false, true));
            }
            let sol = beta_stationary(cache.cache_size, cp, mkt, opts.beta_max, false)?;
            let new_cache = cache_optimum(sol.capacity_increment, cp, mkt)?;
            let beta_move =
                (sol.capacity_increment - beta).abs() <= opts.rel_tol * beta.abs().max(1.0);
            let cache_move = (new_cache.cache_size - cache.cache_size).abs()
                <= opts.rel_tol * cache.cache_size.abs().max(1.0);
            beta = sol.capacity_increment;
            cache = new_cache;
            interior_beta = sol.interior;
            if beta_move && cache_move {
                return Ok((beta, cache, interior_beta, true));
            }
        }
        Ok((beta, cache, interior_beta, false))
    };

    let (mut beta, mut cache, mut interior_beta, converged) = alternate(0.0)?;
    let (best_v, _) = virtual_profit(beta, cache.cache_size, cp, mkt)?;

    // Coarse grid cross-check guarding against coordinate-wise traps.
    let n = opts.grid_points.max(2);
    let log_axis = |lo: f64, hi: f64, i: usize| -> f64 {
        (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()
    };
    let cache_hi = cp.content_size - 1.0;
    let mut grid_best: Option<(f64, f64, f64)> = None; // (V, beta, S)
    for bi in 0..=n {
        let b = if bi == 0 {
            0.0
        } else {
            log_axis(opts.grid_beta_floor, opts.beta_max, bi - 1)
        };
        for si in 0..n {
            let s = log_axis(opts.grid_cache_floor.min(cache_hi), cache_hi, si);
            let (v, _) = virtual_profit(b, s, cp, mkt)?;
            if grid_best.is_none_or(|(gv, _, _)| v > gv) {
                grid_best = Some((v, b, s));
            }
        }
    }
    let mut refined_converged = converged;
    if let Some((grid_v, grid_beta, _)) = grid_best {
        if grid_v > best_v {
            let (b2, c2, i2, conv2) = alternate(grid_beta)?;
            let (v2, _) = virtual_profit(b2, c2.cache_size, cp, mkt)?;
            if v2 > best_v {
                beta = b2;
                cache = c2;
                interior_beta = i2;
                refined_converged = conv2;
            }
        }
    }
    if !refined_converged {
        let best = outcome_at(beta, cache, interior_beta, cp, mkt)?;
        return Err(DesignError::NonConvergence {
            iterations: opts.max_iterations,
            best: Box::new(best),
        });
    }
    outcome_at(beta, cache, interior_beta, cp, mkt)
}
