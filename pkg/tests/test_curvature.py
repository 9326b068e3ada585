import math

import numpy as np
import pytest

from conftest import random_connected_graph
from graphcurv import (
    GraphFunction,
    WeightedGraph,
    cd_check,
    cd_extremal_function,
    curvature_profile,
    curvature_solve,
    gamma_k,
    generate,
    laplacian,
    local_forms,
)
from graphcurv.curvature import CURVATURE_CAP, CURVATURE_TOL, cd_matrix
from graphcurv.graphs import ball


def single_edge():
    return generate("complete", 2)


# -- cd_check -------------------------------------------------------------------


def test_cd_check_hand_values():
    g = single_edge()
    holds, eig = cd_check(g, 2.0, math.inf, "v0")
    assert holds and eig == pytest.approx(0.0, abs=1e-12)
    holds, eig = cd_check(g, 2.1, math.inf, "v0")
    assert not holds and eig == pytest.approx(-0.05, abs=1e-12)
    holds, eig = cd_check(g, 1.0, 2.0, "v0")
    assert holds and eig == pytest.approx(0.0, abs=1e-12)


def test_cd_check_isolated_vertex_vacuous():
    g = WeightedGraph(["a"], {}, {"a": 1.0})
    holds, eig = cd_check(g, 1e5, math.inf, "a")
    assert holds and math.isinf(eig)


def test_cd_check_rejects_bad_dimension():
    with pytest.raises(ValueError):
        cd_check(single_edge(), 0.0, -1.0, "v0")


# -- curvature_solve ---------------------------------------------------------------


def test_solver_single_edge_dimensions():
    g = single_edge()
    assert curvature_solve(g, "v0", math.inf).curvature == pytest.approx(2.0, abs=1e-8)
    for n in (1.0, 2.0, 5.0, 100.0):
        r = curvature_solve(g, "v0", n)
        assert r.converged
        assert r.curvature == pytest.approx(2.0 - 2.0 / n, abs=1e-8)


def test_solver_isolated_vertex_caps():
    g = WeightedGraph(["a"], {}, {"a": 1.0})
    r = curvature_solve(g, "a", math.inf)
    assert r.curvature == CURVATURE_CAP and r.converged


def test_solver_bracket_certificate():
    rng = np.random.default_rng(21)
    g = random_connected_graph(rng, 10)
    for x in g.vertices[:3]:
        r = curvature_solve(g, x, math.inf)
        assert cd_check(g, r.curvature - 2 * r.bracket_width, math.inf, x)[0]
        assert not cd_check(g, r.curvature + 2 * r.bracket_width + 1e-12, math.inf, x)[0]


def test_solver_soundness_random_functions():
    rng = np.random.default_rng(22)
    g = random_connected_graph(rng, 12)
    for x in g.vertices[:4]:
        r = curvature_solve(g, x, math.inf)
        K = r.curvature - 10 * CURVATURE_TOL
        for _ in range(50):
            f = GraphFunction(g, rng.uniform(-1, 1, g.num_vertices))
            slack = (
                gamma_k(g, 2, f).value(x) - K * gamma_k(g, 1, f).value(x)
            )
            assert slack >= -1e-9


def test_solver_tightness_witness():
    rng = np.random.default_rng(23)
    g = random_connected_graph(rng, 10)
    for x in g.vertices[:3]:
        r = curvature_solve(g, x, math.inf)
        w = cd_extremal_function(g, x, math.inf, r.curvature)
        slack = gamma_k(g, 2, w).value(x) - r.curvature * gamma_k(g, 1, w).value(x)
        assert abs(slack) <= 10 * CURVATURE_TOL


def test_monotone_in_dimension():
    rng = np.random.default_rng(24)
    g = random_connected_graph(rng, 10)
    dims = [1.0, 2.0, 5.0, 50.0, math.inf]
    for x in g.vertices[:3]:
        values = [curvature_solve(g, x, n).curvature for n in dims]
        for lo, hi in zip(values, values[1:]):
            assert lo <= hi + 1e-8


def test_weight_scaling_scales_curvature():
    rng = np.random.default_rng(25)
    g = random_connected_graph(rng, 9)
    lam = 3.25
    scaled = WeightedGraph(
        g.vertices,
        {(u, v): lam * w for u, v, w in g.edges()},
        {v: g.measure(v) for v in g.vertices},
    )
    for x in g.vertices[:3]:
        k1 = curvature_solve(g, x, math.inf).curvature
        k2 = curvature_solve(scaled, x, math.inf).curvature
        assert k2 == pytest.approx(lam * k1, rel=1e-8, abs=1e-7)


def test_smallest_eigenvalue_decreases_in_K():
    rng = np.random.default_rng(26)
    g = random_connected_graph(rng, 10)
    x = g.vertices[0]
    forms = local_forms(g, x)
    eigs = [
        float(np.linalg.eigvalsh(cd_matrix(forms, K, math.inf))[0])
        for K in np.linspace(-5, 5, 21)
    ]
    assert all(a >= b - 1e-12 for a, b in zip(eigs, eigs[1:]))


def test_kernel_safety():
    # functions vanishing on the 1-ball: no gradient, no Laplacian, Gamma_2 >= 0
    rng = np.random.default_rng(27)
    g = random_connected_graph(rng, 14)
    x = g.vertices[0]
    inner = ball(g, x, 1)
    for _ in range(20):
        arr = rng.uniform(-1, 1, g.num_vertices)
        for v in inner:
            arr[g.index(v)] = 0.0
        f = GraphFunction(g, arr)
        assert gamma_k(g, 1, f).value(x) == 0.0
        assert laplacian(g, f).value(x) == 0.0
        assert gamma_k(g, 2, f).value(x) >= -1e-12


# -- profile -----------------------------------------------------------------------


def test_profile_single_edge_symmetric():
    p = curvature_profile(single_edge(), math.inf)
    assert p.global_curvature == pytest.approx(2.0, abs=1e-8)
    assert len(p.per_vertex) == 2
    assert p.global_curvature == min(r.curvature for r in p.per_vertex)


def test_profile_path3_cross_checked_pointwise():
    g = generate("path", 3)
    p = curvature_profile(g, math.inf)
    rng = np.random.default_rng(28)
    K = p.global_curvature - 1e-6
    F = rng.uniform(-1, 1, (g.num_vertices, 1000))
    from graphcurv.operators import gamma_array, gamma_recursive_array

    g2 = gamma_recursive_array(g, 2, F, F)
    g1 = gamma_array(g, F, F)
    assert float(np.min(g2 - K * g1)) >= -1e-9


def test_profile_large_n_approaches_infinity_case():
    rng = np.random.default_rng(29)
    g = random_connected_graph(rng, 8)
    p_inf = curvature_profile(g, math.inf)
    p_big = curvature_profile(g, 1e9)
    for a, b in zip(p_inf.per_vertex, p_big.per_vertex):
        assert a.curvature == pytest.approx(b.curvature, abs=1e-6)


def test_profile_parallel_matches_serial():
    rng = np.random.default_rng(30)
    g = random_connected_graph(rng, 10)
    serial = curvature_profile(g, math.inf)
    parallel = curvature_profile(g, math.inf, jobs=4)
    assert serial == parallel


def test_known_family_values():
    # classical values for unit weights and counting measure: complete graphs
    # carry (N+2)/2, hypercubes carry 2, and the 4-cycle is the 2-cube
    assert curvature_profile(generate("complete", 5), math.inf).global_curvature == pytest.approx(3.5, abs=1e-8)
    assert curvature_profile(generate("hypercube", 3), math.inf).global_curvature == pytest.approx(2.0, abs=1e-8)
    assert curvature_profile(generate("cycle", 4), math.inf).global_curvature == pytest.approx(2.0, abs=1e-8)
