"""Shared test helpers: random graphs and naive single-vertex oracles.

The naive oracles below follow the pointwise definitions with plain Python
loops over neighbors.  They deliberately share no code with the package's
vectorized kernels so that agreement between the two is a genuine check.
"""

from __future__ import annotations

import numpy as np

from graphcurv import GraphFunction, WeightedGraph


def random_connected_graph(
    rng: np.random.Generator,
    n: int,
    extra_edge_prob: float = 0.15,
    weight_range: tuple[float, float] = (0.1, 2.0),
    measure_range: tuple[float, float] = (0.1, 2.0),
) -> WeightedGraph:
    """Random spanning tree plus extra edges, fuzzed weights and measures."""
    names = [f"v{i}" for i in range(n)]
    weights: dict[tuple[str, str], float] = {}
    for i in range(1, n):
        parent = int(rng.integers(0, i))
        weights[(names[parent], names[i])] = float(rng.uniform(*weight_range))
    for i in range(n):
        for j in range(i + 1, n):
            if (names[i], names[j]) not in weights and rng.random() < extra_edge_prob:
                weights[(names[i], names[j])] = float(rng.uniform(*weight_range))
    measure = {v: float(rng.uniform(*measure_range)) for v in names}
    return WeightedGraph(names, weights, measure)


def random_function(rng: np.random.Generator, g: WeightedGraph, lo=-1.0, hi=1.0) -> GraphFunction:
    return GraphFunction(g, rng.uniform(lo, hi, g.num_vertices))


def naive_laplacian(g: WeightedGraph, f: dict[str, float]) -> dict[str, float]:
    out = {}
    for x in g.vertices:
        acc = 0.0
        for y in g.neighbors(x):
            acc += g.weight(x, y) * (f[y] - f[x])
        out[x] = acc / g.measure(x)
    return out


def naive_gamma(g: WeightedGraph, f: dict[str, float], h: dict[str, float]) -> dict[str, float]:
    out = {}
    for x in g.vertices:
        acc = 0.0
        for y in g.neighbors(x):
            acc += g.weight(x, y) * (f[y] - f[x]) * (h[y] - h[x])
        out[x] = acc / (2.0 * g.measure(x))
    return out


def naive_gamma2(g: WeightedGraph, f: dict[str, float], h: dict[str, float]) -> dict[str, float]:
    lap_h = naive_laplacian(g, h)
    lap_f = naive_laplacian(g, f)
    term1 = naive_laplacian(g, naive_gamma(g, f, h))
    term2 = naive_gamma(g, f, lap_h)
    term3 = naive_gamma(g, lap_f, h)
    return {x: 0.5 * (term1[x] - term2[x] - term3[x]) for x in g.vertices}
