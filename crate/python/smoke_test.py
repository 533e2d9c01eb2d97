#!/usr/bin/env python3
"""Smoke test for the consortium_py extension module.

Builds expectations around the reference design tables and the coalition
payoff identities. Locates the cdylib produced by cargo (release first,
then debug), or imports an installed consortium_py if one is available.

    cargo build --release -p consortium-py
    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def import_module():
    try:
        import consortium_py  # installed via maturin/pip

        return consortium_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        built = REPO / "target" / profile / "libconsortium_py.so"
        if built.exists():
            stage = Path(tempfile.mkdtemp(prefix="consortium_py_"))
            shutil.copy2(built, stage / "consortium_py.so")
            sys.path.insert(0, str(stage))
            import consortium_py

            return consortium_py
    sys.exit(
        "consortium_py not found: run `cargo build --release -p consortium-py` first"
    )


def close(a, b, rel=1e-6):
    return math.isclose(a, b, rel_tol=rel, abs_tol=1e-12)


def main():
    cp_mod = import_module()

    # --- model primitives ---------------------------------------------
    assert cp_mod.hit_probability(0.0, 1e5) == 0.0
    assert close(cp_mod.hit_probability(4211.0, 1e5), 0.7249, rel=1e-3)
    try:
        cp_mod.hit_probability(-1.0, 1e5)
        raise AssertionError("negative cache size must be rejected")
    except ValueError:
        pass

    assert close(cp_mod.optimal_price(1.5, 1.0, 0.1, 0.0), 3.0)
    assert close(cp_mod.optimal_price(1.5, 1.0, 0.1, 14.4), 7.32)

    # --- design optimization (reference-table single CP) --------------
    cp = cp_mod.CpParams(fixed_cost=0.0)
    market = cp_mod.MarketParams(fixed_cost=0.0, cache_unit_cost=1.0)
    nn = cp_mod.optimize(cp, market, net_neutrality=True)
    assert nn.capacity_increment == 0.0
    assert close(nn.price, 3.0)
    assert close(nn.cache_size, 4211.29, rel=1e-4)
    assert close(nn.virtual_profit, 82611.68, rel=1e-4)

    nnn = cp_mod.optimize(cp, market)
    assert close(nnn.capacity_increment, 14.3881, rel=1e-3)
    assert close(nnn.virtual_profit, 122413.08, rel=1e-4)
    assert nnn.interior_cache and nnn.interior_beta

    state = cp_mod.subscribers(nnn.price, nnn.capacity_increment, nnn.cache_size, cp, market)
    assert state.subscribers > 0 and 0 < state.hit_prob < 1

    # --- coalition game ------------------------------------------------
    game = cp_mod.CoalitionGame([10.0], 4.0)
    assert game.egalitarian_payoffs() == [3.0, 3.0]
    assert game.shapley_closed_form() == [3.0, 3.0]
    brute = game.shapley_bruteforce()
    assert all(close(a, b) for a, b in zip(brute, [3.0, 3.0]))
    assert game.characteristic_value([1, 2]) == 6.0
    assert game.characteristic_value([1]) == 0.0

    lopsided = cp_mod.CoalitionGame([1.0, 100.0], 0.0)
    assert not lopsided.admission_condition()
    admitted, removed = lopsided.admission_control()
    assert admitted == [2] and removed[0][0] == 1

    report = cp_mod.verify_subgame_efficiency(lopsided, 0.99)
    assert not report.subgame_efficient and report.witness is not None

    # --- bargaining ------------------------------------------------------
    fair = cp_mod.CoalitionGame([10.0, 11.0, 12.0], 6.0)
    cont = cp_mod.solve_continuation(fair, 0.9999)
    equal = fair.grand_value() / 4.0
    assert all(close(c, equal, rel=1e-3) for c in cont)
    sim_a = cp_mod.simulate(fair, trials=2000, seed=9)
    sim_b = cp_mod.simulate(fair, trials=2000, seed=9)
    assert sim_a.mean_payoffs == sim_b.mean_payoffs  # seeded determinism
    assert sim_a.agreement_rate == 1.0 and sim_a.efficient_regime

    # --- scenario runner -------------------------------------------------
    summary = cp_mod.run_scenario("", scenario_id="smoke")
    assert summary.full_admission and summary.admitted == [1, 2, 3, 4, 5]
    assert close(summary.egalitarian_share, summary.full_value / 6.0, rel=1e-9)
    assert summary.report_csv.count("\n") == 7  # header + 5 CPs + ISP
    nn_summary = cp_mod.run_scenario("", net_neutrality=True, scenario_id="smoke-nn")
    assert nn_summary.outcomes[0].capacity_increment == 0.0
    assert nn_summary.full_value < summary.full_value

    print("consortium_py smoke test: OK")


if __name__ == "__main__":
    main()
