//! Property tests for the subscriber and profit primitives.

mod common;

use consortium::model::{
    hit_probability, integrated_profit, noncoalitional_profits, subscribers, CpDesign, CpParams,
    MarketParams, UnitPrices,
};
use proptest::prelude::*;

fn content_size() -> impl Strategy<Value = f64> {
    (2.0f64..6.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    /// The hit probability is monotone nondecreasing and concave in the
    /// cache size, checked by finite differences on a dense grid.
    #[test]
    fn hit_probability_monotone_concave(sigma in content_size()) {
        let points = 120usize;
        let mut prev = hit_probability(0.0, sigma).unwrap();
        let mut prev_delta = f64::INFINITY;
        for i in 1..=points {
            let cache = (sigma - 1.0) * (i as f64 / points as f64);
            let h = hit_probability(cache, sigma).unwrap();
            prop_assert!(h >= prev);
            prop_assert!((0.0..=1.0).contains(&h));
            let delta = h - prev;
            // concavity: increments shrink (tiny slack for rounding)
            prop_assert!(delta <= prev_delta + 1e-12);
            prev = h;
            prev_delta = delta;
        }
    }

    /// Subscribers are nonnegative, and zero exactly when the cache is
    /// empty (the demand pool is positive by construction).
    #[test]
    fn subscribers_nonnegative_and_zero_iff_no_cache(
        price in 0.5f64..50.0,
        beta in 0.0f64..100.0,
        srel in 0.0f64..1.0,
        sigma in content_size(),
    ) {
        let cp = CpParams { content_size: sigma, ..CpParams::default() };
        let mkt = MarketParams::default();
        let cache = srel * (sigma - 1.0);
        let state = subscribers(&CpDesign::new(price, beta, cache), &cp, &mkt).unwrap();
        prop_assert!(state.subscribers >= 0.0);
        prop_assert_eq!(state.subscribers == 0.0, cache == 0.0);
    }

    /// For any unit prices, total non-coalitional profit equals the sum
    /// of the virtual-consortium profits minus the ISP fixed cost: the
    /// transfer terms cancel. (The no-agreement convention is excluded
    /// by giving the first CP a positive cache.)
    #[test]
    fn transfer_invariance(
        s1 in 1.0f64..9e4,
        s2 in 0.0f64..9e4,
        p1 in 1.1f64..40.0,
        p2 in 1.1f64..40.0,
        b1 in 0.0f64..50.0,
        b2 in 0.0f64..50.0,
        ts1 in 0.0f64..10.0,
        ts2 in 0.0f64..10.0,
        tb1 in 0.0f64..5.0,
        tb2 in 0.0f64..5.0,
    ) {
        let cps = [CpParams::default(), CpParams { elasticity: 1.8, ..CpParams::default() }];
        let mkt = MarketParams::default();
        let designs = [CpDesign::new(p1, b1, s1), CpDesign::new(p2, b2, s2)];
        let prices = [
            UnitPrices::new(ts1, tb1).unwrap(),
            UnitPrices::new(ts2, tb2).unwrap(),
        ];
        let (isp, cp_profits) = noncoalitional_profits(&designs, &prices, &cps, &mkt).unwrap();
        let lhs = isp + cp_profits.iter().sum::<f64>();
        let rhs = designs
            .iter()
            .zip(&cps)
            .map(|(d, cp)| integrated_profit(d, cp, &mkt).unwrap())
            .sum::<f64>()
            - mkt.isp_fixed_cost;
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * scale, "lhs {lhs} rhs {rhs}");
    }
}
