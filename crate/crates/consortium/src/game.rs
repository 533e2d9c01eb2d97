//! Coalitional game construction, admission control, and payoff rules.
//!
//! Players are K content providers (ids 1..=K) and the ISP (id K+1).
//! The characteristic function is
//!
//! ```text
//! v(Theta + ISP) = sum_{k in Theta} v_k - F     (Theta nonempty)
//! v(anything without the ISP) = 0
//! v({ISP}) = 0
//! ```
//!
//! where `v_k` is CP k's optimized virtual profit and `F` the ISP fixed
//! cost. Adding a CP to an ISP-containing coalition raises its value by
//! exactly `v_k`, so the game is super-additive whenever the `v_k` are
//! positive.
//!
//! The grand coalition forms under the random-proposer protocol exactly
//! when per-capita value grows with coalition size, which reduces to the
//! admission condition `v_min >= v(grand)/(K+1)` — equivalently, the
//! subsidy from large to small contributors is bounded:
//! `(v_avg + F)/(K+1) >= v_avg - v_min`.

use crate::design::CpOutcome;
use crate::model::{subscribers, CpParams, MarketParams, ModelError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("a game needs at least one content provider")]
    EmptyGame,
    #[error("cp value {value} for player {player} is not finite")]
    NonFiniteValue { player: usize, value: f64 },
    #[error("fixed cost {0} must be nonnegative and finite")]
    BadFixedCost(f64),
    #[error("player id {id} out of range 1..={max}")]
    InvalidPlayer { id: usize, max: usize },
    #[error("{count} players exceed the enumeration cap of {max}")]
    TooManyPlayers { count: usize, max: usize },
    #[error("payoff rule requires an admissible game")]
    NotAdmissible,
    #[error("settlement identity violated: isp payoff residual {residual}")]
    SettlementIdentity { residual: f64 },
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A set of players encoded as a bitmask: bit `i-1` is player `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coalition {
    mask: u32,
}

impl Coalition {
    pub fn empty() -> Self {
        Self { mask: 0 }
    }

    pub fn from_mask(mask: u32) -> Self {
        Self { mask }
    }

    pub fn from_players(players: &[usize]) -> Self {
        let mut mask = 0;
        for &p in players {
            assert!((1..=32).contains(&p), "player id {p} out of range");
            mask |= 1 << (p - 1);
        }
        Self { mask }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn contains(&self, player: usize) -> bool {
        (1..=32).contains(&player) && self.mask & (1 << (player - 1)) != 0
    }

    pub fn insert(&mut self, player: usize) {
        assert!(
            (1..=32).contains(&player),
            "player id {player} out of range"
        );
        self.mask |= 1 << (player - 1);
    }

    pub fn remove(&mut self, player: usize) {
        if (1..=32).contains(&player) {
            self.mask &= !(1 << (player - 1));
        }
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_subset_of(&self, other: &Coalition) -> bool {
        self.mask & !other.mask == 0
    }

    /// Player ids in ascending order.
    pub fn players(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=32).filter(move |&p| self.contains(p))
    }
}

/// Why a CP was denied admission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemovalReason {
    /// Nonpositive optimized profit.
    Unprofitable,
    /// Smallest contributor removed while the admission condition failed.
    SmallestContributor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Removal {
    pub cp: usize,
    pub value: f64,
    pub reason: RemovalReason,
}

/// Result of iterative admission control.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissionReport {
    /// Admitted CP ids, ascending.
    pub admitted: Vec<usize>,
    /// Removal log in the order removals happened.
    pub removed: Vec<Removal>,
}

/// Characteristic-function game of K CPs plus the ISP.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalitionGame {
    cp_values: Vec<f64>,
    isp_fixed_cost: f64,
}

/// Enumeration cap for the exponential routines (per-capita scan,
/// subgame checks).
pub const MAX_ENUMERATION_PLAYERS: usize = 16;

impl CoalitionGame {
    pub fn new(cp_values: Vec<f64>, isp_fixed_cost: f64) -> Result<Self, GameError> {
        if cp_values.is_empty() {
            return Err(GameError::EmptyGame);
        }
        for (i, &v) in cp_values.iter().enumerate() {
            if !v.is_finite() {
                return Err(GameError::NonFiniteValue {
                    player: i + 1,
                    value: v,
                });
            }
        }
        if !isp_fixed_cost.is_finite() || isp_fixed_cost < 0.0 {
            return Err(GameError::BadFixedCost(isp_fixed_cost));
        }
        Ok(Self {
            cp_values,
            isp_fixed_cost,
        })
    }

    /// Builds the game from optimized CP outcomes.
    pub fn from_outcomes(outcomes: &[CpOutcome], isp_fixed_cost: f64) -> Result<Self, GameError> {
        Self::new(
            outcomes.iter().map(|o| o.virtual_profit).collect(),
            isp_fixed_cost,
        )
    }

    pub fn cp_count(&self) -> usize {
        self.cp_values.len()
    }

    pub fn player_count(&self) -> usize {
        self.cp_values.len() + 1
    }

    /// Id of the ISP player (K+1).
    pub fn isp_id(&self) -> usize {
        self.cp_values.len() + 1
    }

    pub fn cp_values(&self) -> &[f64] {
        &self.cp_values
    }

    pub fn cp_value(&self, cp: usize) -> Result<f64, GameError> {
        self.cp_values
            .get(cp.wrapping_sub(1))
            .copied()
            .ok_or(GameError::InvalidPlayer {
                id: cp,
                max: self.cp_count(),
            })
    }

    pub fn isp_fixed_cost(&self) -> f64 {
        self.isp_fixed_cost
    }

    pub fn grand_coalition(&self) -> Coalition {
        Coalition::from_mask((1u32 << self.player_count()) - 1)
    }

    /// Characteristic value. ISP plus at least one CP: sum of member
    /// values minus the fixed cost (not clamped at zero); everything
    /// else, including the lone ISP, is worth nothing.
    pub fn characteristic_value(&self, coalition: &Coalition) -> f64 {
        if !coalition.contains(self.isp_id()) {
            return 0.0;
        }
        let cp_sum: f64 = (1..=self.cp_count())
            .filter(|&k| coalition.contains(k))
            .map(|k| self.cp_values[k - 1])
            .sum();
        if coalition.len() == 1 {
            0.0
        } else {
            cp_sum - self.isp_fixed_cost
        }
    }

    /// Value of the grand coalition, `sum v_k - F`.
    pub fn grand_value(&self) -> f64 {
        self.cp_values.iter().sum::<f64>() - self.isp_fixed_cost
    }

    /// Per-capita value `v(c)/|c|` of a nonempty coalition.
    pub fn per_capita(&self, coalition: &Coalition) -> f64 {
        assert!(!coalition.is_empty(), "per-capita of the empty coalition");
        self.characteristic_value(coalition) / coalition.len() as f64
    }

    fn min_value(&self) -> f64 {
        self.cp_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Grand-coalition admission condition
    /// `v_min >= v(grand) / (K+1)`.
    pub fn admission_condition(&self) -> bool {
        self.min_value() >= self.grand_value() / self.player_count() as f64
    }

    /// Equivalent subsidy-gap form of the admission condition:
    /// `(v_avg + F)/(K+1) >= v_avg - v_min`.
    pub fn subsidy_gap_condition(&self) -> bool {
        let k = self.cp_count() as f64;
        let avg = self.cp_values.iter().sum::<f64>() / k;
        (avg + self.isp_fixed_cost) / (k + 1.0) >= avg - self.min_value()
    }

    /// Exhaustively checks that per-capita value is monotone over nested
    /// ISP-containing coalitions: `PC(Psi+) >= PC(Theta+)` for every
    /// nonempty Theta strictly inside Psi within the CP set.
    pub fn percapita_monotone(&self) -> Result<bool, GameError> {
        if self.player_count() > MAX_ENUMERATION_PLAYERS {
            return Err(GameError::TooManyPlayers {
                count: self.player_count(),
                max: MAX_ENUMERATION_PLAYERS,
            });
        }
        let k = self.cp_count();
        let isp_bit = 1u32 << (self.isp_id() - 1);
        for psi in 1u32..(1 << k) {
            let pc_psi = self.per_capita(&Coalition::from_mask(psi | isp_bit));
            // proper nonempty submasks of psi
            let mut theta = (psi - 1) & psi;
            while theta != 0 {
                let pc_theta = self.per_capita(&Coalition::from_mask(theta | isp_bit));
                if pc_psi < pc_theta {
                    return Ok(false);
                }
                theta = (theta - 1) & psi;
            }
        }
        Ok(true)
    }

    /// Game restricted to the given CPs (ids from this game). The
    /// returned game renumbers them 1..=m in the given order.
    pub fn reduced(&self, cps: &[usize]) -> Result<CoalitionGame, GameError> {
        let mut values = Vec::with_capacity(cps.len());
        for &cp in cps {
            values.push(self.cp_value(cp)?);
        }
        CoalitionGame::new(values, self.isp_fixed_cost)
    }

    /// Iterative admission control: drop every CP with nonpositive
    /// value, then drop the smallest contributor (lowest id on ties)
    /// until the admission condition holds or nobody is left.
    pub fn admission_control(&self) -> AdmissionReport {
        let mut active: Vec<usize> = (1..=self.cp_count()).collect();
        let mut removed = Vec::new();

        active.retain(|&k| {
            let v = self.cp_values[k - 1];
            if v <= 0.0 {
                removed.push(Removal {
                    cp: k,
                    value: v,
                    reason: RemovalReason::Unprofitable,
                });
                false
            } else {
                true
            }
        });

        loop {
            if active.is_empty() {
                break;
            }
            let sub = self.reduced(&active).expect("active ids are valid");
            if sub.admission_condition() {
                break;
            }
            // both v_min and the average move after a removal, so re-test
            let (pos, _) = active
                .iter()
                .enumerate()
                .min_by(|(_, &a), (_, &b)| {
                    self.cp_values[a - 1]
                        .partial_cmp(&self.cp_values[b - 1])
                        .expect("finite values")
                })
                .expect("nonempty");
            let cp = active.remove(pos);
            removed.push(Removal {
                cp,
                value: self.cp_values[cp - 1],
                reason: RemovalReason::SmallestContributor,
            });
        }
        AdmissionReport {
            admitted: active,
            removed,
        }
    }

    /// Egalitarian payoffs `w_i = v(grand)/(K+1)` for every player, ISP
    /// last. Defined only on admissible games.
    pub fn egalitarian_payoffs(&self) -> Result<Vec<f64>, GameError> {
        if !self.admission_condition() {
            return Err(GameError::NotAdmissible);
        }
        let share = self.grand_value() / self.player_count() as f64;
        Ok(vec![share; self.player_count()])
    }

    /// Closed-form Shapley payoffs:
    /// `x_k = v_k/2 - F/(K(K+1))` for CPs and
    /// `x_ISP = sum v_k / 2 - K F/(K+1)`.
    pub fn shapley_closed_form(&self) -> Vec<f64> {
        let k = self.cp_count() as f64;
        let f = self.isp_fixed_cost;
        let mut x: Vec<f64> = self
            .cp_values
            .iter()
            .map(|v| 0.5 * v - f / (k * (k + 1.0)))
            .collect();
        x.push(0.5 * self.cp_values.iter().sum::<f64>() - k * f / (k + 1.0));
        x
    }

    /// Shapley payoffs by averaging marginal contributions over all
    /// `(K+1)!` player orderings. Exact up to floating-point
    /// accumulation; refuses more than 10 CPs.
    pub fn shapley_bruteforce(&self) -> Result<Vec<f64>, GameError> {
        const MAX_CPS: usize = 10;
        if self.cp_count() > MAX_CPS {
            return Err(GameError::TooManyPlayers {
                count: self.cp_count(),
                max: MAX_CPS,
            });
        }
        let n = self.player_count();
        let mut order: Vec<usize> = (1..=n).collect();
        let mut sums = vec![0.0f64; n];
        let mut count = 0u64;
        // Heap's algorithm over player orderings
        let mut c = vec![0usize; n];
        let accumulate = |order: &[usize], sums: &mut [f64]| {
            let mut coalition = Coalition::empty();
            let mut prev = 0.0;
            for &p in order {
                coalition.insert(p);
                let cur = self.characteristic_value(&coalition);
                sums[p - 1] += cur - prev;
                prev = cur;
            }
        };
        accumulate(&order, &mut sums);
        count += 1;
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    order.swap(0, i);
                } else {
                    order.swap(c[i], i);
                }
                accumulate(&order, &mut sums);
                count += 1;
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        let total = count as f64;
        Ok(sums.into_iter().map(|s| s / total).collect())
    }

    /// Shapley payoffs for reporting: the closed form when every CP
    /// value is positive (its derivation assumes positive contributors),
    /// otherwise the permutation average.
    pub fn shapley(&self) -> Result<Vec<f64>, GameError> {
        if self.cp_values.iter().all(|&v| v > 0.0) {
            Ok(self.shapley_closed_form())
        } else {
            self.shapley_bruteforce()
        }
    }

    /// Whether the admission condition survives the given CPs dropping
    /// out. Vacuously true when every CP leaves.
    pub fn sustainability_check(&self, dropouts: &[usize]) -> Result<bool, GameError> {
        for &cp in dropouts {
            if cp < 1 || cp > self.cp_count() {
                return Err(GameError::InvalidPlayer {
                    id: cp,
                    max: self.cp_count(),
                });
            }
        }
        let keep: Vec<usize> = (1..=self.cp_count())
            .filter(|k| !dropouts.contains(k))
            .collect();
        if keep.is_empty() {
            return Ok(true);
        }
        Ok(self.reduced(&keep)?.admission_condition())
    }
}

/// Settlement transfers that realize the egalitarian split.
#[derive(Debug, Clone, PartialEq)]
pub struct SettlementReport {
    /// Payment `T_k = (p_k - c) n_k - c_S S_k - f_k - w_k` from each CP
    /// to the ISP.
    pub transfers: Vec<f64>,
    /// Egalitarian payoffs the transfers implement, ISP last.
    pub egalitarian: Vec<f64>,
    /// Residual of the ISP book-keeping identity
    /// `w_ISP = sum T_k - eta_beta sum beta_k n_k - eta_S sum S_k - F`,
    /// relative to the payoff scale.
    pub isp_residual: f64,
}

/// Relative tolerance for the ISP settlement identity.
const SETTLEMENT_TOL: f64 = 1e-9;

/// Computes per-CP settlements for an admissible game and verifies the
/// ISP's book-keeping identity.
pub fn settlements(
    game: &CoalitionGame,
    outcomes: &[CpOutcome],
    cps: &[CpParams],
    mkt: &MarketParams,
) -> Result<SettlementReport, GameError> {
    if outcomes.len() != game.cp_count() {
        return Err(GameError::LengthMismatch {
            expected: game.cp_count(),
            got: outcomes.len(),
        });
    }
    if cps.len() != game.cp_count() {
        return Err(GameError::LengthMismatch {
            expected: game.cp_count(),
            got: cps.len(),
        });
    }
    let egalitarian = game.egalitarian_payoffs()?;
    let share = egalitarian[0];

    let mut transfers = Vec::with_capacity(outcomes.len());
    let mut isp_books = -mkt.isp_fixed_cost;
    for (outcome, cp) in outcomes.iter().zip(cps) {
        let d = &outcome.design;
        let n = if d.cache_size == 0.0 {
            0.0
        } else {
            subscribers(d, cp, mkt)?.subscribers
        };
        let t = (d.price - mkt.subscriber_cost) * n
            - cp.cache_unit_cost * d.cache_size
            - cp.fixed_cost
            - share;
        transfers.push(t);
        isp_books += t
            - mkt.isp_capacity_unit_cost * d.capacity_increment * n
            - mkt.isp_cache_unit_cost * d.cache_size;
    }
    let scale = share.abs().max(1.0);
    let residual = (isp_books - share) / scale;
    if residual.abs() > SETTLEMENT_TOL {
        return Err(GameError::SettlementIdentity { residual });
    }
    Ok(SettlementReport {
        transfers,
        egalitarian,
        isp_residual: residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn game(values: &[f64], f: f64) -> CoalitionGame {
        CoalitionGame::new(values.to_vec(), f).unwrap()
    }

    #[test]
    fn characteristic_values() {
        let g = game(&[10.0, 20.0, 30.0], 15.0);
        // CP-only coalitions and the lone ISP are worthless
        assert_eq!(
            g.characteristic_value(&Coalition::from_players(&[1, 2])),
            0.0
        );
        assert_eq!(g.characteristic_value(&Coalition::from_players(&[4])), 0.0);
        // ISP-containing coalitions
        assert_eq!(
            g.characteristic_value(&Coalition::from_players(&[1, 4])),
            -5.0
        );
        assert_eq!(g.characteristic_value(&g.grand_coalition()), 45.0);
        assert_eq!(g.grand_value(), 45.0);
    }

    #[test]
    fn adding_a_cp_adds_its_value() {
        let g = game(&[7.0, 11.0, 13.0], 5.0);
        let isp = g.isp_id();
        for k in 1..=3usize {
            let mut with = Coalition::from_players(&[isp]);
            for j in 1..=3 {
                if j != k {
                    with.insert(j);
                }
            }
            let mut plus = with;
            plus.insert(k);
            assert_relative_eq!(
                g.characteristic_value(&plus) - g.characteristic_value(&with),
                g.cp_values()[k - 1]
            );
        }
    }

    #[test]
    fn admission_on_reference_case_study_values() {
        // unrestricted regime: v5 and v(grand) as published
        let v5 = 1.3997e5;
        let v_grand = 8.3843e5;
        let others = (v_grand + 1e5 - v5) / 4.0;
        let g = game(&[others, others, others, others, v5], 1e5);
        assert_relative_eq!(g.grand_value(), v_grand, max_relative = 1e-12);
        assert!(g.admission_condition());

        // net-neutral regime: v5 falls below the equal share
        let v5 = 4.2033e4;
        let v_grand = 3.4939e5;
        let others = (v_grand + 1e5 - v5) / 4.0;
        let g = game(&[others, others, others, others, v5], 1e5);
        assert!(!g.admission_condition());
        let report = g.admission_control();
        assert_eq!(report.removed.len(), 1);
        assert_eq!(report.removed[0].cp, 5);
        assert_eq!(report.admitted, vec![1, 2, 3, 4]);
        // the remaining four satisfy the condition
        assert!(g.reduced(&report.admitted).unwrap().admission_condition());
    }

    #[test]
    fn homogeneous_games_always_admit() {
        for f in [0.0, 1.0, 1e6] {
            let g = game(&[42.0; 5], f);
            assert!(g.admission_condition());
            assert!(g.subsidy_gap_condition());
        }
    }

    #[test]
    fn admission_control_identity_when_condition_holds() {
        let g = game(&[10.0, 12.0, 11.0], 3.0);
        assert!(g.admission_condition());
        let report = g.admission_control();
        assert_eq!(report.admitted, vec![1, 2, 3]);
        assert!(report.removed.is_empty());
    }

    #[test]
    fn admission_control_drops_unprofitable_first() {
        let g = game(&[-5.0, 10.0, 0.0], 2.0);
        let report = g.admission_control();
        assert_eq!(report.admitted, vec![2]);
        assert_eq!(report.removed[0].reason, RemovalReason::Unprofitable);
        assert_eq!(report.removed.len(), 2);

        let g = game(&[-1.0, 0.0], 2.0);
        assert!(g.admission_control().admitted.is_empty());
    }

    #[test]
    fn egalitarian_two_player_split() {
        let g = game(&[10.0], 4.0);
        let w = g.egalitarian_payoffs().unwrap();
        assert_eq!(w, vec![3.0, 3.0]);
        assert_relative_eq!(w.iter().sum::<f64>(), g.grand_value());
    }

    #[test]
    fn egalitarian_share_on_reference_case_study() {
        // grand value 8.3843e5 over six players
        let v5 = 1.3997e5;
        let others = (8.3843e5 + 1e5 - v5) / 4.0;
        let g = game(&[others, others, others, others, v5], 1e5);
        let w = g.egalitarian_payoffs().unwrap();
        assert_eq!(w.len(), 6);
        assert_relative_eq!(w[0], 1.3974e5, max_relative = 2e-2);
        assert_relative_eq!(w[0], 8.3843e5 / 6.0, max_relative = 1e-12);
    }

    #[test]
    fn settlement_matches_hand_formula_on_reference_design() {
        // single CP, unrestricted regime, eta_S = 1, no fixed costs:
        // T_1 = (p - c) n - c_S S - w_1 with w_1 = v_1 / 2
        use crate::design::optimize_cp;
        use crate::model::subscribers;
        let cp = CpParams {
            cache_unit_cost: 0.5,
            fixed_cost: 0.0,
            ..CpParams::default()
        };
        let mkt = MarketParams {
            isp_fixed_cost: 0.0,
            isp_cache_unit_cost: 1.0,
            ..MarketParams::default()
        };
        let outcome = optimize_cp(&cp, &mkt, false).unwrap();
        let g = game(&[outcome.virtual_profit], 0.0);
        let report = settlements(&g, std::slice::from_ref(&outcome), &[cp], &mkt).unwrap();

        let n = subscribers(&outcome.design, &cp, &mkt).unwrap().subscribers;
        let w1 = outcome.virtual_profit / 2.0;
        let expected = (outcome.design.price - 1.0) * n - 0.5 * outcome.design.cache_size - w1;
        assert_relative_eq!(report.transfers[0], expected, max_relative = 1e-12);
        // frozen values of this design
        assert_relative_eq!(n, 26234.8236376, max_relative = 1e-6);
        assert_relative_eq!(report.transfers[0], 102653.794214, max_relative = 1e-6);
        assert!(report.isp_residual.abs() <= 1e-9);
    }

    #[test]
    fn egalitarian_requires_admissibility() {
        let g = game(&[1.0, 100.0], 0.0);
        assert!(!g.admission_condition());
        assert!(matches!(
            g.egalitarian_payoffs(),
            Err(GameError::NotAdmissible)
        ));
    }

    #[test]
    fn shapley_two_player_split() {
        let g = game(&[10.0], 4.0);
        assert_eq!(g.shapley_closed_form(), vec![3.0, 3.0]);
        let brute = g.shapley_bruteforce().unwrap();
        assert_abs_diff_eq!(brute[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(brute[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn shapley_without_fixed_cost_halves_values() {
        let g = game(&[8.0, 20.0, 6.0], 0.0);
        let x = g.shapley_bruteforce().unwrap();
        assert_abs_diff_eq!(x[0], 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x[1], 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x[2], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x[3], 17.0, epsilon = 1e-12);
    }

    #[test]
    fn shapley_efficiency() {
        let g = game(&[4.0, 9.0, 25.0, 2.0], 7.0);
        let x = g.shapley_closed_form();
        assert_relative_eq!(x.iter().sum::<f64>(), g.grand_value(), max_relative = 1e-12);
    }

    #[test]
    fn sustainability_closure_examples() {
        let g = game(&[10.0, 11.0, 12.0], 6.0);
        assert!(g.admission_condition());
        assert!(g.sustainability_check(&[3]).unwrap());
        assert!(g.sustainability_check(&[1, 2]).unwrap());
        assert!(g.sustainability_check(&[1, 2, 3]).unwrap());
        assert!(g.sustainability_check(&[9]).is_err());
    }

    #[test]
    fn settlement_degenerate_design() {
        use crate::model::CpDesign;
        let cp = CpParams {
            fixed_cost: 100.0,
            ..CpParams::default()
        };
        // v = -f for the all-zero design; F = 100 keeps the game admissible
        let g = game(&[-100.0], 100.0);
        assert!(g.admission_condition());
        let outcome = CpOutcome {
            design: CpDesign::new(3.0, 0.0, 0.0),
            virtual_profit: -100.0,
            profit_coefficient: 1.0,
            interior_cache: false,
            interior_beta: false,
            cache_at_boundary: false,
        };
        let mkt = MarketParams {
            isp_fixed_cost: 100.0,
            ..MarketParams::default()
        };
        let report = settlements(&g, &[outcome], &[cp], &mkt).unwrap();
        // T = -f - w with n = 0
        assert_relative_eq!(report.transfers[0], -100.0 - report.egalitarian[0]);
    }
}
