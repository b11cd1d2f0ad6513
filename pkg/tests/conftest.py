import math
import random

import pytest

from secinvest import NodeAttr, validate


def chain_graph(specs, edges=None):
    """Build a simple chain from (id, loss, p0, kappa) tuples; last node is the target."""
    nodes = []
    for i, (nid, loss, p0, kappa) in enumerate(specs):
        investable = i != len(specs) - 1
        nodes.append(NodeAttr(nid, loss, p0, kappa, investable))
    ids = [s[0] for s in specs]
    edges = edges or list(zip(ids, ids[1:]))
    return validate(nodes, edges, [ids[0]], ids[-1])


@pytest.fixture
def base_network():
    """The minimal three-node network: v1 -> v2 -> vg, L=(1,1,6), kappa=(1,2), p0=1."""
    return chain_graph([("v1", 1.0, 1.0, 1.0), ("v2", 1.0, 1.0, 2.0), ("vg", 6.0, 1.0, 1.0)])


@pytest.fixture
def diamond():
    """v1 -> {v2, v3} -> vg with branch losses 5 and 3."""
    nodes = [
        NodeAttr("v1", 1.0),
        NodeAttr("v2", 5.0),
        NodeAttr("v3", 3.0),
        NodeAttr("vg", 2.0, investable=False),
    ]
    edges = [("v1", "v2"), ("v1", "v3"), ("v2", "vg"), ("v3", "vg")]
    return validate(nodes, edges, ["v1"], "vg")


def base_loss_closed_form(l1, l2, lg, k1, k2, p, budget):
    """Base-network equilibrium loss, both internal nodes invested."""
    inner = (k1 / (k2 - k1)) * (l1 * p / (l2 * p**2 + lg * p**3))
    return (l1 * k2 * p / (k2 - k1)) * inner ** (-k1 / k2) * math.exp(-k1 * budget)


def scada_graph():
    """The industrial control-system case study (losses in absolute units)."""
    m = 1e6
    nodes = [
        NodeAttr("v1", 0.01 * m, 0.18, 1.0),
        NodeAttr("v2", 0.01 * m, 0.18, 1.0),
        NodeAttr("v3", 0.02 * m, 0.09, 1.0),
        NodeAttr("v4", 0.02 * m, 0.09, 1.0),
        NodeAttr("v5", 20 * m, 0.09, 3.0),
        NodeAttr("v6", 0.2 * m, 0.13, 3.0),
        NodeAttr("v7", 1000 * m, 0.08, 5.0),
        NodeAttr("v8", 2000 * m, 0.08, 5.0),
        NodeAttr("vg", 10000 * m, 1.0, 1.0, False),
    ]
    edges = [
        ("v1", "v3"), ("v2", "v4"), ("v3", "v5"), ("v4", "v5"),
        ("v5", "v6"), ("v6", "v7"), ("v6", "v8"), ("v7", "vg"), ("v8", "vg"),
    ]
    return validate(nodes, edges, ["v1", "v2"], "vg")


def random_sp_graph(rng: random.Random, max_interior: int = 10):
    """Random single-source series-parallel DAG with optional input star.

    Interior nodes draw kappa in [1, 5], loss in [0.1, 10], p0 in (0, 1];
    fans use single-node branches so the calculus applies at depth.
    """

    counter = [0]

    def attrs():
        counter[0] += 1
        return NodeAttr(
            f"n{counter[0]}",
            rng.uniform(0.1, 10.0),
            rng.uniform(0.05, 1.0),
            rng.uniform(1.0, 5.0),
        )

    nodes: list[NodeAttr] = []
    edges: list[tuple[str, str]] = []

    def chain(entry: str, exit_: str, length: int):
        prev = entry
        for _ in range(length):
            node = attrs()
            nodes.append(node)
            edges.append((prev, node.id))
            prev = node.id
        edges.append((prev, exit_))

    def fan(entry: str, exit_: str, width: int):
        for _ in range(width):
            node = attrs()
            nodes.append(node)
            edges.append((entry, node.id))
            edges.append((node.id, exit_))

    target = NodeAttr("vg", rng.uniform(1.0, 10.0), rng.uniform(0.05, 1.0), 1.0, False)
    nodes.append(target)
    remaining = rng.randint(3, max_interior)
    cursor = "vg"
    while remaining > 0:
        joint = attrs()
        nodes.append(joint)
        if rng.random() < 0.5 and remaining >= 3:
            width = rng.randint(2, min(3, remaining - 1))
            fan(joint.id, cursor, width)
            remaining -= width + 1
        else:
            length = rng.randint(0, min(2, remaining - 1))
            chain(joint.id, cursor, length)
            remaining -= length + 1
        cursor = joint.id
    if rng.random() < 0.4:
        shared = rng.uniform(0.1, 10.0)
        srcs = []
        for _ in range(rng.randint(2, 3)):
            counter[0] += 1
            s = NodeAttr(
                f"s{counter[0]}", shared, rng.uniform(0.05, 1.0), rng.uniform(1.0, 5.0)
            )
            nodes.append(s)
            edges.append((s.id, cursor))
            srcs.append(s.id)
        sources = srcs
    else:
        sources = [cursor]
    return validate(nodes, edges, sources, "vg")
