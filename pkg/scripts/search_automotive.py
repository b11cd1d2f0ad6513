"""Search for the automotive attack-graph topology behind the published study.

The automotive case names node attributes and the optimal investments, but
the figure showing the edges is not recoverable from the text.  This script
enumerates candidate topologies consistent with the narrative (cellular ->
connected services / vehicle connection -> remote diagnostics -> TCU;
Wi-Fi/USB -> head unit -> CAN; OBD-II diagnostics) and scores each candidate
by how well the solved equilibrium reproduces the published investment
vector and loss.  The winner is frozen into src/secinvest/datasets/.

Published targets (budget 5, node 1 not investable):
  x* = [0, 0, 0, 0, 0.8179, 2.8317, 0.0956, 0.3820, 0, 0.5796, 0, 0.2932, 0, 0]
  L* = 1.8837
  Hybrid node 15 after node 6, parallel with node 10 (L=20, p0=0.25,
  kappa=2) lowers the loss to 1.7625.
"""

import itertools
import json
import sys

from secinvest import (
    GameInstance,
    GraphValidationError,
    InterventionSpec,
    NodeAttr,
    apply_intervention,
    solve,
    validate,
)

ATTRS = {
    "1": (1.0, 1.0, 1.0),
    "2": (1.0, 0.25, 1.0),
    "3": (1.0, 0.5, 1.0),
    "4": (1.0, 0.25, 1.0),
    "5": (5.0, 0.75, 3.0),
    "6": (10.0, 0.75, 1.0),
    "7": (5.0, 0.75, 3.0),
    "8": (5.0, 0.75, 3.0),
    "9": (5.0, 0.75, 3.0),
    "10": (20.0, 0.75, 2.0),
    "11": (20.0, 0.25, 2.0),
    "12": (5.0, 0.5, 2.0),
    "13": (5.0, 0.25, 1.0),
    "14": (20.0, 1.0, 1.0),
    "g": (50.0, 1.0, 1.0),
}

PUBLISHED_X = {
    "1": 0.0, "2": 0.0, "3": 0.0, "4": 0.0, "5": 0.8179, "6": 2.8317,
    "7": 0.0956, "8": 0.3820, "9": 0.0, "10": 0.5796, "11": 0.0,
    "12": 0.2932, "13": 0.0, "14": 0.0,
}
PUBLISHED_LOSS = 1.8837
BUDGET = 5.0

# per-node outgoing-edge alternatives; the product is the candidate space.
# The published equilibrium is reproduced exactly (max coordinate error
# < 1e-4) by: 5->9->12, 2->7->12, 3->8 and 4->8 with 8->12, 12->13->14->g,
# and the 1->6->10->11->14 diagnostics chain; that candidate is in this
# space and wins the scoring below.
SUCC_CHOICES = {
    "1": [("5", "6")],
    "2": [("7",), ("12",), ("13",)],
    "3": [("12",), ("8",)],
    "4": [("12",), ("8",), ("7",)],
    "5": [("9",), ("11",)],
    "6": [("10",)],
    "7": [("13",), ("12",), ("8",)],
    "8": [("13",), ("12",), ("14",)],
    "9": [("11",), ("13",), ("12",)],
    "10": [("11",)],
    "11": [("14",), ("g",)],
    "12": [("8",), ("13",)],
    "13": [("14",), ("g",)],
    "14": [("g",)],
}


def build(edges):
    nodes = [
        NodeAttr(v, loss, p0, kappa, investable=(v not in ("1", "g")))
        for v, (loss, p0, kappa) in ATTRS.items()
    ]
    used = {a for e in edges for a in e}
    if used != set(ATTRS):
        return None
    sources = sorted({v for v in ATTRS if not any(b == v for _, b in edges)})
    if set(sources) != {"1", "2", "3", "4"}:
        return None
    try:
        return validate(nodes, sorted(set(edges)), sources, "g")
    except GraphValidationError:
        return None


def score(g):
    try:
        res = solve(GameInstance(g, BUDGET), tol=1e-9)
    except Exception:
        return None
    err_x = max(abs(res.x_star[v] - PUBLISHED_X[v]) for v in PUBLISHED_X)
    err_l = abs(res.loss_star - PUBLISHED_LOSS) / PUBLISHED_LOSS
    return err_x + err_l, err_x, err_l, res


def hybrid_loss(g):
    spec = InterventionSpec(kind="hybrid", anchor="10", node=NodeAttr("15", 20.0, 0.25, 2.0))
    try:
        return solve(GameInstance(apply_intervention(g, spec), BUDGET), tol=1e-9).loss_star
    except Exception:
        return float("nan")


def main():
    ranked = []
    keys = list(SUCC_CHOICES)
    seen = set()
    n_valid = 0
    for combo in itertools.product(*(SUCC_CHOICES[k] for k in keys)):
        edges = tuple(sorted({(a, b) for a, succs in zip(keys, combo) for b in succs}))
        if edges in seen:
            continue
        seen.add(edges)
        g = build(list(edges))
        if g is None:
            continue
        n_valid += 1
        s = score(g)
        if s is None:
            continue
        ranked.append((s[0], s[1], s[2], edges, s[3]))
    ranked.sort(key=lambda t: t[0])
    print(f"{n_valid} valid topologies scored")
    for total, ex, el, edges, res in ranked[:10]:
        print(f"score={total:.4f} max|dx|={ex:.4f} dL={el:.4%} L*={res.loss_star:.4f} "
              f"hybrid={hybrid_loss(build(list(edges))):.4f}")
        print("  edges:", list(edges))
        print("  x*:", {k: round(v, 4) for k, v in sorted(res.x_star.as_dict().items()) if v > 1e-6})
    if not ranked:
        print("no valid candidate")
        return
    best = ranked[0]
    if len(sys.argv) > 1 and sys.argv[1] == "--freeze":
        doc = {
            "meta": {
                "name": "automotive",
                "description": (
                    "Remote attack on an automotive CAN bus. The published table "
                    "fixes the node attributes; the edge set here is a "
                    "reconstruction found by scripts/search_automotive.py, chosen "
                    "to best reproduce the published optimal investments "
                    "(max coordinate error {:.4f}) and loss (off by {:.3%})."
                ).format(best[1], best[2]),
            },
            "graph": {
                "nodes": [
                    {
                        "id": v,
                        "loss": ATTRS[v][0],
                        "p0": ATTRS[v][1],
                        "kappa": ATTRS[v][2],
                        "investable": v not in ("1", "g"),
                    }
                    for v in ATTRS
                ],
                "edges": [list(e) for e in best[3]],
                "sources": ["1", "2", "3", "4"],
                "target": "g",
            },
            "budget": BUDGET,
        }
        with open("src/secinvest/datasets/automotive.json", "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        print("frozen to src/secinvest/datasets/automotive.json")


if __name__ == "__main__":
    main()
