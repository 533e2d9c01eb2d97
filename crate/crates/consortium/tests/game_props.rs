//! Property tests for the coalitional game: admission equivalences,
//! dropout closure, core membership, and the Shapley oracle.

mod common;

use common::{random_admissible_game, random_game, rng};
use consortium::game::{Coalition, CoalitionGame, GameError};
use rand::Rng;

#[test]
fn admission_equivalent_to_percapita_monotonicity() {
    let mut rng = rng(0x1001);
    let mut holds = 0;
    for i in 0..300 {
        let k = (i % 8) + 1;
        let game = random_game(&mut rng, k);
        let admission = game.admission_condition();
        let monotone = game.percapita_monotone().unwrap();
        assert_eq!(admission, monotone, "game {:?}", game);
        holds += admission as usize;
    }
    // the draw is tuned to exercise both branches
    assert!(holds > 50 && holds < 250, "one-sided sample: {holds}");
}

#[test]
fn corollary_forms_agree_exactly() {
    let mut rng = rng(0x1002);
    for i in 0..500 {
        let k = (i % 8) + 1;
        let game = random_game(&mut rng, k);
        assert_eq!(game.admission_condition(), game.subsidy_gap_condition());
    }
}

#[test]
fn superadditivity_over_admitted_cps() {
    // Joining an ISP coalition that already has a CP adds exactly the
    // joiner's value. (From the lone ISP, worth 0 by convention, the
    // first CP brings v_k - F instead.)
    let mut rng = rng(0x1003);
    for i in 0..100 {
        let k = (i % 6) + 1;
        let game = random_game(&mut rng, k);
        let isp_bit = 1u32 << (game.isp_id() - 1);
        let magnitude = game.cp_values().iter().sum::<f64>().abs() + game.isp_fixed_cost().abs();
        for theta in 1u32..(1 << k) {
            let base = Coalition::from_mask(theta | isp_bit);
            for cp in 1..=k {
                if base.contains(cp) {
                    continue;
                }
                let mut plus = base;
                plus.insert(cp);
                let gain = game.characteristic_value(&plus) - game.characteristic_value(&base);
                let expected = game.cp_values()[cp - 1];
                assert!((gain - expected).abs() <= 1e-9 * magnitude.max(1.0));
                assert!(gain > 0.0); // values drawn positive
            }
        }
    }
}

#[test]
fn dropouts_preserve_admission() {
    let mut rng = rng(0x1004);
    for i in 0..100 {
        let k = (i % 8) + 1;
        let game = random_admissible_game(&mut rng, k);
        for mask in 0u32..(1 << k) {
            let dropouts: Vec<usize> = (1..=k).filter(|&c| mask & (1 << (c - 1)) != 0).collect();
            assert!(
                game.sustainability_check(&dropouts).unwrap(),
                "dropouts {dropouts:?} broke admission in {game:?}"
            );
        }
    }
}

#[test]
fn egalitarian_vector_lies_in_the_core() {
    let mut rng = rng(0x1005);
    for i in 0..100 {
        let k = (i % 8) + 1;
        let game = random_admissible_game(&mut rng, k);
        let w = game.egalitarian_payoffs().unwrap();
        let share = w[0];
        for mask in 1u32..(1 << (k + 1)) {
            let coalition = Coalition::from_mask(mask);
            let members = coalition.len() as f64;
            let value = game.characteristic_value(&coalition);
            assert!(
                members * share >= value - 1e-9 * value.abs().max(1.0),
                "coalition {mask:#b} blocks: {} < {}",
                members * share,
                value
            );
        }
    }
}

#[test]
fn closed_form_shapley_matches_permutation_average() {
    let mut rng = rng(0x1006);
    for i in 0..60 {
        let k = (i % 6) + 1;
        let game = random_game(&mut rng, k);
        let closed = game.shapley_closed_form();
        let brute = game.shapley_bruteforce().unwrap();
        for (c, b) in closed.iter().zip(&brute) {
            let scale = c.abs().max(b.abs()).max(1.0);
            assert!((c - b).abs() <= 1e-9 * scale, "{closed:?} vs {brute:?}");
        }
    }
}

#[test]
fn payoff_vectors_are_budget_balanced() {
    let mut rng = rng(0x1007);
    for i in 0..200 {
        let k = (i % 8) + 1;
        let game = random_admissible_game(&mut rng, k);
        let grand = game.grand_value();
        let w: f64 = game.egalitarian_payoffs().unwrap().iter().sum();
        let x: f64 = game.shapley_closed_form().iter().sum();
        let scale = grand.abs().max(1.0);
        assert!((w - grand).abs() <= 1e-9 * scale);
        assert!((x - grand).abs() <= 1e-9 * scale);
    }
}

#[test]
fn random_dropout_subsets_stay_admissible() {
    let mut rng = rng(0x1008);
    for _ in 0..300 {
        let k = rng.random_range(1..=8);
        let game = random_admissible_game(&mut rng, k);
        let mask: u32 = rng.random_range(0..(1 << k));
        let dropouts: Vec<usize> = (1..=k).filter(|&c| mask & (1 << (c - 1)) != 0).collect();
        assert!(game.sustainability_check(&dropouts).unwrap());
    }
}

#[test]
fn enumeration_caps_are_enforced() {
    let game = CoalitionGame::new(vec![1.0; 20], 0.0).unwrap();
    assert!(matches!(
        game.percapita_monotone(),
        Err(GameError::TooManyPlayers { .. })
    ));
    let game = CoalitionGame::new(vec![1.0; 11], 0.0).unwrap();
    assert!(matches!(
        game.shapley_bruteforce(),
        Err(GameError::TooManyPlayers { .. })
    ));
}
