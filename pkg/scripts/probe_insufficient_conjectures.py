"""Numerically probe the two unproven insufficient-budget conjectures.

The engine never relies on these (its insufficient-budget support is limited
to single series chains); this script only gathers evidence.  Conjecture A:
under an insufficient budget, sub-networks closer to the target receive
their optimal investments first.  Conjecture B: an insufficient budget over
a parallel fan leaves the root at zero and splits the rest across the
branches per the stated closed form.

Usage: python3 scripts/probe_insufficient_conjectures.py [trials]
"""

import math
import random
import sys

from secinvest import GameInstance, NodeAttr, solve, sufficient_budget, validate


def probe_series_first(trials: int, rng: random.Random) -> None:
    """Does the deeper chain node fill before the head under scarcity?"""
    violations = 0
    for _ in range(trials):
        k1 = rng.uniform(1.0, 2.0)
        k2 = k1 + rng.uniform(0.3, 2.0)
        nodes = [
            NodeAttr("a", rng.uniform(0.5, 4), 1.0, k1),
            NodeAttr("b", rng.uniform(0.5, 4), 1.0, k2),
            NodeAttr("g", rng.uniform(1, 8), 1.0, 1.0, False),
        ]
        g = validate(nodes, [("a", "b"), ("b", "g")], ["a"], "g")
        full = sufficient_budget(g)
        if full <= 1e-6:
            continue
        scarce = rng.uniform(0.1, 0.9) * full
        res = solve(GameInstance(g, scarce))
        # conjectured: the inner node keeps its closed-form level until the
        # budget runs out, the head gets only the remainder
        expected_b = min(scarce, full)
        if abs(res.x_star["b"] - expected_b) > 1e-4 or res.x_star["a"] > 1e-6:
            violations += 1
    print(f"series-first: {violations}/{trials} violations")


def probe_parallel_split(trials: int, rng: random.Random) -> None:
    """Root-zero and the stated branch split under fan scarcity."""
    checked = 0
    stats = {"root_zero": 0, "verbatim": 0, "equalized": 0}
    for _ in range(trials):
        k_i = rng.uniform(1.0, 1.4)
        kb = [rng.uniform(3.0, 6.0), rng.uniform(3.0, 6.0)]
        lb = sorted([rng.uniform(1.0, 5.0), rng.uniform(1.0, 5.0)])
        lg = rng.uniform(1.0, 5.0)
        nodes = [
            NodeAttr("r", rng.uniform(0.2, 2), 1.0, k_i),
            NodeAttr("b1", lb[0], 1.0, kb[0]),
            NodeAttr("b2", lb[1], 1.0, kb[1]),
            NodeAttr("g", lg, 1.0, 1.0, False),
        ]
        g = validate(
            nodes,
            [("r", "b1"), ("r", "b2"), ("b1", "g"), ("b2", "g")],
            ["r"],
            "g",
        )
        full = sufficient_budget(g)
        if full <= 0.2:
            continue
        scarce = rng.uniform(0.3, 0.8) * full
        res = solve(GameInstance(g, scarce))
        checked += 1
        root_zero = res.x_star["r"] <= 1e-6
        k_par = 1 / kb[0] + 1 / kb[1]
        t = scarce
        verbatim_ok = equalized_ok = True
        for r_idx, (k_r, l_r, other_l, other_k) in enumerate(
            [(kb[0], lb[0], lb[1], kb[1]), (kb[1], lb[1], lb[0], kb[0])]
        ):
            got = res.x_star[f"b{r_idx + 1}"]
            # verbatim printed form: 1/k_r weight and (L_j+Lg)/(L_r+Lg) ratio
            verbatim = (1.0 / (k_r * k_par)) * (
                t + (1.0 / k_r) * math.log((other_l + lg) / (l_r + lg))
            )
            # equalization-derived form: 1/k_j weight, inverted ratio
            equalized = (1.0 / (k_r * k_par)) * (
                t + (1.0 / other_k) * math.log((l_r + lg) / (other_l + lg))
            )
            if abs(got - verbatim) > 5e-3 * max(1.0, abs(verbatim)):
                verbatim_ok = False
            if abs(got - equalized) > 5e-3 * max(1.0, abs(equalized)):
                equalized_ok = False
        stats["root_zero"] += root_zero
        stats["verbatim"] += verbatim_ok and root_zero
        stats["equalized"] += equalized_ok and root_zero
    print(
        f"parallel-split over {checked} scarce fans: root-zero holds in "
        f"{stats['root_zero']}, the printed closed form fits {stats['verbatim']}, "
        f"the equalization-derived form (1/k_j weights, inverted ratio) fits "
        f"{stats['equalized']}"
    )


def main():
    trials = int(sys.argv[1]) if len(sys.argv) > 1 else 40
    rng = random.Random(2024)
    probe_series_first(trials, rng)
    probe_parallel_split(trials, rng)


if __name__ == "__main__":
    main()
