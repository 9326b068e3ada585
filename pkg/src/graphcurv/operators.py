"""Graph Laplacian and the iterated carre du champ operators.

The Laplacian is (Delta f)(x) = (1/m(x)) * sum_y b(x,y) (f(y) - f(x)).
The Gamma hierarchy starts from the pointwise product Gamma_0(f,h) = f*h and
iterates

    2 Gamma_{k+1}(f,h) = Delta Gamma_k(f,h) - Gamma_k(f, Delta h)
                                            - Gamma_k(Delta f, h).

Gamma_1 (written Gamma) measures the squared gradient and has the closed form
(1/2m(x)) * sum_y b(x,y) (f(y)-f(x)) (h(y)-h(x)); Gamma_2 carries the
Bochner-type curvature information used by the CD solver.

All public operations act on GraphFunction values.  The array-level helpers
accept (N,) vectors or (N,B) batches and are shared by the curvature and
estimate modules, which need to evaluate the operators on many functions at
once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import GraphFunction, WeightedGraph, _check_graph_function, ball

__all__ = [
    "LocalForms",
    "laplacian",
    "gamma_k",
    "gamma_closed_form",
    "local_forms",
]


# -- array kernels (shared internally) -----------------------------------


def laplacian_array(g: WeightedGraph, F: np.ndarray) -> np.ndarray:
    """Apply the Laplacian to one function (N,) or a batch (N,B)."""
    W = g.weight_matrix
    m = g.measure_vector
    degw = W.sum(axis=1)
    if F.ndim == 1:
        return (W @ F - degw * F) / m
    return (W @ F - degw[:, None] * F) / m[:, None]


def gamma_array(g: WeightedGraph, F: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Closed-form Gamma, accumulated edge by edge to avoid cancellation."""
    iu, iv, w = g.edge_arrays
    m = g.measure_vector
    squeeze = F.ndim == 1
    F2 = F[:, None] if squeeze else F
    H2 = H[:, None] if squeeze else H
    if len(iu) == 0:
        out = np.zeros_like(F2)
    else:
        contrib = w[:, None] * (F2[iu] - F2[iv]) * (H2[iu] - H2[iv])
        out = (g.incidence_matrix @ contrib) / (2.0 * m[:, None])
    return out[:, 0] if squeeze else out


def gamma_recursive_array(g: WeightedGraph, k: int, F: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Gamma_k through the defining recursion, for k in {0, 1, 2}."""
    if k == 0:
        return F * H
    prev = gamma_recursive_array(g, k - 1, F, H)
    a = laplacian_array(g, prev)
    b = gamma_recursive_array(g, k - 1, F, laplacian_array(g, H))
    c = gamma_recursive_array(g, k - 1, laplacian_array(g, F), H)
    return 0.5 * (a - b - c)


# -- public pointwise operators ------------------------------------------


def laplacian(g: WeightedGraph, f: GraphFunction) -> GraphFunction:
    """Delta f as a new GraphFunction on the same graph."""
    _check_graph_function(g, f)
    return GraphFunction(g, laplacian_array(g, f.array))


def gamma_k(g: WeightedGraph, k: int, f: GraphFunction, h: GraphFunction | None = None) -> GraphFunction:
    """Gamma_k(f, h) pointwise via the recursion; h defaults to f.

    Only k = 0, 1, 2 are supported; higher iterates are not used anywhere in
    the curvature theory implemented here.
    """
    if k not in (0, 1, 2):
        raise ValueError(f"k must be 0, 1 or 2, got {k}")
    _check_graph_function(g, f)
    if h is None:
        h = f
    else:
        _check_graph_function(g, h, "h")
    return GraphFunction(g, gamma_recursive_array(g, k, f.array, h.array))


def gamma_closed_form(g: WeightedGraph, f: GraphFunction, h: GraphFunction | None = None) -> GraphFunction:
    """Gamma(f, h) by the explicit edge-difference formula.

    Serves as the independent computation path against the recursion; both
    must agree to floating rounding.
    """
    _check_graph_function(g, f)
    if h is None:
        h = f
    else:
        _check_graph_function(g, h, "h")
    return GraphFunction(g, gamma_array(g, f.array, h.array))


# -- local quadratic forms -------------------------------------------------


@dataclass(frozen=True)
class LocalForms:
    """Quadratic-form realization of Gamma_2, Gamma and Delta at one vertex.

    ``support`` lists the punctured 2-ball around ``center`` (neighbors
    first, then distance-2 vertices, each in index order).  For a function f
    with f(center) = 0 written as a coefficient vector over the support,

        f' gamma2_matrix f  = Gamma_2(f)(center)
        f' gamma_matrix  f  = Gamma(f)(center)
        laplace_vector . f  = (Delta f)(center)

    Pinning f(center) = 0 is lossless because all three operators are
    invariant under adding constants, and it removes the trivial null
    direction from the curvature eigenproblem.  ``gamma_matrix`` and
    ``laplace_vector`` vanish outside the 1-ball coordinates.
    """

    center: str
    support: tuple[str, ...]
    gamma2_matrix: np.ndarray
    gamma_matrix: np.ndarray
    laplace_vector: np.ndarray

    @property
    def size(self) -> int:
        return len(self.support)


def local_forms(g: WeightedGraph, x: str) -> LocalForms:
    """Assemble the local forms at x from the pointwise bilinear operators.

    Each matrix entry is the corresponding bilinear operator evaluated on a
    pair of coordinate indicator functions of the punctured 2-ball, so the
    assembly has no formula of its own to get wrong.
    """
    ix = g.index(x)
    one_ball = sorted(g.index(v) for v in ball(g, x, 1) if v != x)
    two_sphere = sorted(
        g.index(v) for v in ball(g, x, 2) - ball(g, x, 1)
    )
    support_idx = one_ball + two_sphere
    s = len(support_idx)
    names = tuple(g.vertices[i] for i in support_idx)
    if s == 0:
        return LocalForms(
            center=x,
            support=(),
            gamma2_matrix=_frozen(np.zeros((0, 0))),
            gamma_matrix=_frozen(np.zeros((0, 0))),
            laplace_vector=_frozen(np.zeros(0)),
        )

    basis = np.zeros((g.num_vertices, s))
    basis[support_idx, np.arange(s)] = 1.0

    # one batched evaluation per operator: columns run over pairs i <= j
    ii, jj = np.triu_indices(s)
    g2_vals = gamma_recursive_array(g, 2, basis[:, ii], basis[:, jj])[ix]
    g1_vals = gamma_recursive_array(g, 1, basis[:, ii], basis[:, jj])[ix]

    A2 = np.zeros((s, s))
    B = np.zeros((s, s))
    A2[ii, jj] = g2_vals
    A2[jj, ii] = g2_vals
    B[ii, jj] = g1_vals
    B[jj, ii] = g1_vals
    d = laplacian_array(g, basis)[ix]

    return LocalForms(
        center=x,
        support=names,
        gamma2_matrix=_frozen(A2),
        gamma_matrix=_frozen(B),
        laplace_vector=_frozen(d),
    )


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a
