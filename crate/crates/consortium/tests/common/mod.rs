//! Shared helpers for the integration suites: seeded random games and
//! parameter draws.

#![allow(dead_code)]

use consortium::game::CoalitionGame;
use consortium::model::{CpParams, MarketParams};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Positive CP values with a size spread of up to two orders of
/// magnitude.
pub fn random_values(rng: &mut ChaCha12Rng, k: usize) -> Vec<f64> {
    (0..k)
        .map(|_| {
            let exp: f64 = rng.random_range(-1.0..1.0);
            rng.random_range(1.0..10.0) * 10f64.powf(exp)
        })
        .collect()
}

/// Random game with positive CP values and a fixed cost drawn so that
/// roughly half the draws satisfy the admission condition.
pub fn random_game(rng: &mut ChaCha12Rng, k: usize) -> CoalitionGame {
    let values = random_values(rng, k);
    let total: f64 = values.iter().sum();
    let vmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    // admission holds iff F >= total - (K+1) vmin
    let pivot = (total - (k as f64 + 1.0) * vmin).max(0.0);
    let f = rng.random_range(0.0..(2.0 * pivot + total).max(1.0));
    CoalitionGame::new(values, f).unwrap()
}

/// Random game guaranteed to satisfy the admission condition, with a
/// fixed cost below the total value so the grand coalition is worth
/// something positive.
pub fn random_admissible_game(rng: &mut ChaCha12Rng, k: usize) -> CoalitionGame {
    let values = random_values(rng, k);
    let total: f64 = values.iter().sum();
    let vmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    let f_low = (total - (k as f64 + 1.0) * vmin).max(0.0);
    debug_assert!(f_low < total);
    let f = rng.random_range(f_low..total);
    let game = CoalitionGame::new(values, f).unwrap();
    debug_assert!(game.admission_condition());
    game
}

/// Parameter draw for derivative and concavity checks. Ranges keep the
/// profit magnitude below ~1e6 so finite-difference noise stays well
/// under the acceptance thresholds.
pub struct DesignDraw {
    pub cp: CpParams,
    pub mkt: MarketParams,
    pub beta: f64,
    pub cache: f64,
}

pub fn random_design_point(rng: &mut ChaCha12Rng) -> DesignDraw {
    let content_size = 10f64.powf(rng.random_range(2.0..6.0));
    let cp = CpParams::new(
        10f64.powf(rng.random_range(4.0..5.3)), // demand pool
        rng.random_range(1.05..2.5),            // elasticity
        content_size,
        rng.random_range(0.02..1.0), // cp cache cost
        0.0,
    )
    .unwrap();
    let mkt = MarketParams::new(
        0.0,
        rng.random_range(0.02..1.0), // isp cache cost
        rng.random_range(0.01..0.5), // isp capacity cost
        rng.random_range(0.5..2.0),  // subscriber cost
        rng.random_range(1.5..8.0),  // hit capacity
    )
    .unwrap();
    let beta = if rng.random_bool(0.3) {
        0.0
    } else {
        10f64.powf(rng.random_range(-2.0..2.0))
    };
    let cache_hi = (content_size - 2.0).min(2e5);
    let cache = 10f64.powf(rng.random_range(-0.3..cache_hi.log10()));
    DesignDraw {
        cp,
        mkt,
        beta,
        cache,
    }
}
