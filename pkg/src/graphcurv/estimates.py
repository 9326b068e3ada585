"""Numerical verification of the semigroup gradient and variance estimates.

The curvature bound CD(-K, n) -- statement (i) of a five-way equivalence
whose remaining members name the slack fields below -- holds exactly when
four estimates do, for every nonnegative f, every t >= 0 and every vertex:

  (ii)  Gamma(P_t f) <= e^{2Kt} P_t Gamma(f)
                         - (2/n) Int_0^t e^{2Ks} P_s (P_{t-s} Delta f)^2 ds
  (iii) Gamma(P_t f) <= e^{2Kt} P_t Gamma(f)
                         - ((e^{2Kt}-1)/(Kn)) (P_t Delta f)^2
  (iv)  P_t f^2 - (P_t f)^2 <= ((e^{2Kt}-1)/K) P_t Gamma(f)
                         - ((e^{2Kt}-1-2Kt)/(K^2 n)) (P_t Delta f)^2
  (v)   P_t f^2 - (P_t f)^2 >= ((1-e^{-2Kt})/K) Gamma(P_t f)
                         + ((e^{-2Kt}-1+2Kt)/(K^2 n)) (P_t Delta f)^2

with the K = 0 limit conventions (1 - e^{+-2Kt})/K = -+2t and
(e^{+-2Kt} - 1 -+ 2Kt)/K^2 = 2t^2.  Conversely a failure of these estimates
at small t certifies a CD violation, which makes the slack signs a complete
numerical test of the curvature bound.

Sign convention: K here is taken from the CD(-K, n) hypothesis verbatim, so
a caller holding a solved curvature kappa passes K = -kappa.

The module also covers the supporting identities: Green's formula, the
equality of the ellipticity constant with the l1->linf adjacency norm, the
heat-kernel cutoff construction with its Gamma(eta) <= epsilon bound, the
finite-measure threshold probe, and small-t Taylor coefficient fits.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .curvature import CURVATURE_TOL, curvature_profile
from .graphs import (
    GraphFunction,
    WeightedGraph,
    _check_graph_function,
    ellipticity_constant,
    is_connected,
)
from .heat import HeatOperator, build_heat
from .operators import gamma_array, laplacian_array

__all__ = [
    "REPORT_TOL",
    "QUAD_TOL",
    "PreconditionError",
    "EstimateReport",
    "SweepSummary",
    "CutoffResult",
    "verify_estimates",
    "estimate_sweep",
    "default_corpus",
    "green_check",
    "ec_norm_check",
    "build_cutoff",
    "finiteness_probe",
    "taylor_check",
]

REPORT_TOL = 1e-8  # absolute slack tolerance for verdicts
QUAD_TOL = 1e-8  # relative agreement between Simpson refinements


class PreconditionError(ValueError):
    """A computed precondition (curvature bound, mass bound) failed."""


@dataclass(frozen=True)
class EstimateReport:
    """Slacks of the four estimates at one (function, t, vertex) triple.

    Slacks are oriented so that slack >= 0 means the inequality holds;
    verdicts apply the REPORT_TOL cushion.
    """

    function_id: str
    t: float
    x: str
    K: float
    n: float
    slack_ii: float
    slack_iii: float
    slack_iv: float
    slack_v: float
    quadrature_error_ii: float
    verdicts: dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())


@dataclass(frozen=True)
class SweepSummary:
    passed: bool
    num_reports: int
    num_failures: int
    first_counterexample: EstimateReport | None
    warning: str | None


@dataclass(frozen=True)
class CutoffResult:
    """Heat-kernel cutoff: eta = min(1, max(2 P_t 1_U - 1/2, 0)) at t = 2/eps."""

    eta: GraphFunction
    target_set: frozenset[str]
    epsilon: float
    max_gamma: float


# -- exponential coefficients with stable K -> 0 limits --------------------


def _ratio_plus(K: float, t: float) -> float:
    """(e^{2Kt} - 1)/K, equal to 2t at K = 0."""
    if abs(K) < 1e-12:
        return 2.0 * t
    return math.expm1(2.0 * K * t) / K


def _ratio_minus(K: float, t: float) -> float:
    """(1 - e^{-2Kt})/K, equal to 2t at K = 0."""
    if abs(K) < 1e-12:
        return 2.0 * t
    return -math.expm1(-2.0 * K * t) / K


def _ratio2_plus(K: float, t: float) -> float:
    """(e^{2Kt} - 1 - 2Kt)/K^2, equal to 2t^2 at K = 0."""
    if abs(K) < 1e-12:
        return 2.0 * t * t
    return (math.expm1(2.0 * K * t) - 2.0 * K * t) / (K * K)


def _ratio2_minus(K: float, t: float) -> float:
    """(e^{-2Kt} - 1 + 2Kt)/K^2, equal to 2t^2 at K = 0."""
    if abs(K) < 1e-12:
        return 2.0 * t * t
    return (math.expm1(-2.0 * K * t) + 2.0 * K * t) / (K * K)


# -- core slack computation -------------------------------------------------


def _gradient_integral(
    g: WeightedGraph, h: HeatOperator, K: float, lap_F: np.ndarray, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """Int_0^t e^{2Ks} P_s (P_{t-s} Delta f)^2 ds for every vertex.

    Works on a batch of functions at once (lap_F is (N,B)).  Composite
    Simpson, halved from 8 subintervals until two refinements agree to
    QUAD_TOL relatively for every function (the integrand is analytic in s,
    so convergence is fourth order; the subdivision cap only matters when
    e^{2Ks} spans many decades).  Returns the integral and the final
    refinement difference, both (N,B).
    """
    if t == 0:
        return np.zeros_like(lap_F), np.zeros_like(lap_F)

    cache: dict[float, np.ndarray] = {}

    def integrand(ratio: float) -> np.ndarray:
        val = cache.get(ratio)
        if val is None:
            s = ratio * t
            # Delta f is mean-zero per component, so the kernel-free apply
            # is exact and stays accurate after long smoothing
            u = h.apply_fluctuation_array(t - s, lap_F)
            val = math.exp(2.0 * K * s) * h.apply_array(s, u * u)
            cache[ratio] = val
        return val

    def simpson(nsub: int) -> np.ndarray:
        total = integrand(0.0) + integrand(1.0)
        for i in range(1, nsub):
            total = total + (4.0 if i % 2 else 2.0) * integrand(i / nsub)
        return total * (t / nsub / 3.0)

    nsub = 8
    prev = simpson(nsub)
    while True:
        nsub *= 2
        cur = simpson(nsub)
        diff = np.abs(cur - prev)
        per_function = diff.max(axis=0)
        scale = np.maximum(np.abs(cur).max(axis=0), 1e-30)
        if bool(np.all(per_function <= QUAD_TOL * scale)) or nsub >= 16384:
            return cur, diff
        prev = cur


def _slack_arrays(
    g: WeightedGraph,
    h: HeatOperator,
    K: float,
    n: float,
    F: np.ndarray,
    t: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """All four slacks for a batch of functions; each output is (N,B).

    Gamma(P_t f) and P_t Delta f are evaluated through the kernel-free
    apply: the dropped modes are gradient-free (resp. absent from the
    mean-zero Delta f), and keeping them would swamp the exponentially
    small fluctuations with rounding noise that the e^{2Kt}-sized
    coefficients then amplify past any verdict tolerance.
    """
    lap_F = laplacian_array(g, F)
    gam_F = gamma_array(g, F, F)
    ptF = h.apply_array(t, F)
    pt_gam_F = h.apply_array(t, gam_F)
    ptF_fluct = h.apply_fluctuation_array(t, F)
    gam_ptF = gamma_array(g, ptF_fluct, ptF_fluct)
    pt_lap_F = h.apply_fluctuation_array(t, lap_F)
    variance = h.apply_array(t, F * F) - ptF * ptF

    inv_n = 0.0 if math.isinf(n) else 1.0 / n
    e2kt = math.exp(2.0 * K * t)
    if inv_n:
        integral, diff = _gradient_integral(g, h, K, lap_F, t)
        qerr = 2.0 * inv_n * diff  # refinement difference on the slack scale
        lap_sq = pt_lap_F * pt_lap_F
    else:
        integral = qerr = np.zeros_like(F)
        lap_sq = 0.0

    slack_ii = e2kt * pt_gam_F - 2.0 * inv_n * integral - gam_ptF
    slack_iii = e2kt * pt_gam_F - _ratio_plus(K, t) * inv_n * lap_sq - gam_ptF
    slack_iv = _ratio_plus(K, t) * pt_gam_F - _ratio2_plus(K, t) * inv_n * lap_sq - variance
    slack_v = variance - _ratio_minus(K, t) * gam_ptF - _ratio2_minus(K, t) * inv_n * lap_sq
    return slack_ii, slack_iii, slack_iv, slack_v, qerr


def _check_estimate_inputs(h: HeatOperator, f: GraphFunction, t: float, n: float) -> None:
    if h.dirichlet_domain is not None:
        raise PreconditionError(
            "estimate verification requires the full-graph semigroup; "
            "Dirichlet restrictions lose mass and the estimates do not apply"
        )
    if t < 0:
        raise ValueError("t must be nonnegative")
    if not (float(n) > 0):
        raise ValueError("dimension must be positive (or infinity)")
    if float(np.min(f.array)) < 0:
        raise ValueError("f must be nonnegative")


def _report_from_arrays(
    g: WeightedGraph,
    slacks: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    col: int,
    function_id: str,
    t: float,
    x: str,
    K: float,
    n: float,
) -> EstimateReport:
    ix = g.index(x)
    s2, s3, s4, s5, qerr = (float(a[ix, col]) for a in slacks)
    verdicts = {
        "ii": s2 >= -REPORT_TOL,
        "iii": s3 >= -REPORT_TOL,
        "iv": s4 >= -REPORT_TOL,
        "v": s5 >= -REPORT_TOL,
    }
    return EstimateReport(
        function_id=function_id,
        t=t,
        x=x,
        K=K,
        n=float(n),
        slack_ii=s2,
        slack_iii=s3,
        slack_iv=s4,
        slack_v=s5,
        quadrature_error_ii=qerr,
        verdicts=verdicts,
    )


def verify_estimates(
    g: WeightedGraph,
    K: float,
    n: float,
    f: GraphFunction,
    t: float,
    x: str,
    heat_op: HeatOperator | None = None,
    function_id: str = "f",
) -> EstimateReport:
    """Slacks and verdicts of all four estimates at one (f, t, x)."""
    _check_graph_function(g, f)
    if heat_op is None:
        heat_op = build_heat(g)
    _check_estimate_inputs(heat_op, f, t, n)
    g.index(x)
    slacks = _slack_arrays(g, heat_op, K, float(n), f.array[:, None], t)
    return _report_from_arrays(g, slacks, 0, function_id, t, x, K, float(n))


def estimate_sweep(
    g: WeightedGraph,
    K: float,
    n: float,
    t_grid: Sequence[float],
    function_corpus: Sequence[tuple[str, GraphFunction]],
    heat_op: HeatOperator | None = None,
    jobs: int = 1,
) -> tuple[list[EstimateReport], SweepSummary]:
    """Check the estimates on every (f, t, vertex) combination.

    Returns all reports in (function, t, vertex) order plus a summary with
    the first counterexample, if any.  An empty corpus passes vacuously with
    a warning.
    """
    if heat_op is None:
        heat_op = build_heat(g)
    if not function_corpus:
        return [], SweepSummary(True, 0, 0, None, "empty function corpus")
    n = float(n)
    for fid, f in function_corpus:
        _check_graph_function(g, f)
        _check_estimate_inputs(heat_op, f, min(t_grid, default=0.0), n)
    times = [float(t) for t in t_grid]
    if any(t < 0 for t in times):
        raise ValueError("t must be nonnegative")

    # one batched slack evaluation per t covers the whole corpus
    F = np.stack([f.array for _, f in function_corpus], axis=1)

    def compute(t: float):
        return _slack_arrays(g, heat_op, K, n, F, t)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            slack_sets = dict(zip(times, pool.map(compute, times)))
    else:
        slack_sets = {t: compute(t) for t in times}

    reports = []
    for col, (fid, _) in enumerate(function_corpus):
        for t in times:
            for x in g.vertices:
                reports.append(
                    _report_from_arrays(g, slack_sets[t], col, fid, t, x, K, n)
                )
    failures = [r for r in reports if not r.passed]
    summary = SweepSummary(
        passed=not failures,
        num_reports=len(reports),
        num_failures=len(failures),
        first_counterexample=failures[0] if failures else None,
        warning=None,
    )
    return reports, summary


def default_corpus(
    g: WeightedGraph,
    seed: int = 0,
    heat_op: HeatOperator | None = None,
    num_random: int = 20,
    smoothing_time: float = 0.1,
) -> list[tuple[str, GraphFunction]]:
    """Standard nonnegative test functions for sweeps.

    All vertex indicators, ``num_random`` uniform [0,1] random functions and
    heat-smoothed indicators (clipped at 0 against rounding), which probe
    the near-harmonic regime.
    """
    if heat_op is None:
        heat_op = build_heat(g)
    rng = np.random.default_rng(seed)
    corpus: list[tuple[str, GraphFunction]] = []
    for v in g.vertices:
        corpus.append((f"indicator:{v}", GraphFunction.indicator(g, v)))
    for i in range(num_random):
        corpus.append(
            (f"random:{i}", GraphFunction(g, rng.uniform(0.0, 1.0, g.num_vertices)))
        )
    for v in g.vertices:
        smoothed = heat_op.apply_array(smoothing_time, GraphFunction.indicator(g, v).array)
        corpus.append((f"smoothed:{v}", GraphFunction(g, np.maximum(smoothed, 0.0))))
    return corpus


# -- Green's formula and the ellipticity norm -------------------------------


def green_check(
    g: WeightedGraph, f: GraphFunction, h: GraphFunction
) -> tuple[float, float, float]:
    """(<f, Delta h>_m, <Delta f, h>_m, -sum_x Gamma(f,h)(x) m(x)).

    On a finite graph the three agree: the m-weighted Laplacian is
    self-adjoint and its quadratic form is the summed carre du champ.
    """
    _check_graph_function(g, f)
    _check_graph_function(g, h, "h")
    m = g.measure_vector
    a = float(np.sum(f.array * laplacian_array(g, h.array) * m))
    b = float(np.sum(laplacian_array(g, f.array) * h.array * m))
    c = -float(np.sum(gamma_array(g, f.array, h.array) * m))
    return a, b, c


def ec_norm_check(g: WeightedGraph) -> tuple[float, float]:
    """(ellipticity constant, adjacency operator norm l1(X,m) -> linf(X)).

    The norm is evaluated on vertex indicators: ||A 1_y||_inf / ||1_y||_1
    maximized over y.  Both numbers equal max b(x,y)/(m(x)m(y)), computed by
    independent routes.
    """
    cert = ellipticity_constant(g)
    W = g.weight_matrix
    m = g.measure_vector
    norm = 0.0
    for iy in range(g.num_vertices):
        a_col = W[:, iy] / m  # A applied to the indicator of vertex iy
        if a_col.size:
            norm = max(norm, float(np.max(np.abs(a_col))) / float(m[iy]))
    return cert.constant, norm


# -- cutoff construction and finiteness probe --------------------------------


def build_cutoff(
    g: WeightedGraph,
    S: Sequence[str] | set[str] | frozenset[str],
    epsilon: float,
    U: Sequence[str] | set[str] | frozenset[str],
    h: HeatOperator,
) -> CutoffResult:
    """Cutoff eta with eta = 1 on S and Gamma(eta) <= epsilon, via heat flow.

    Takes t = 2/epsilon and sets eta = min(1, max(2 P_t 1_U - 1/2, 0)).  The
    gradient bound needs nonnegative curvature: under CD(0, infinity) the
    variance estimate gives Gamma(P_t 1_U) <= (1/2t)(P_t 1_U^2 - (P_t 1_U)^2),
    and eta is a 1-Lipschitz contraction of 2 P_t 1_U, so
    Gamma(eta) <= 4 Gamma(P_t 1_U) <= 2/t = epsilon.

    Raises PreconditionError if the curvature profile dips below 0 or if
    P_t 1_U < 3/4 somewhere on S (the caller must choose U large enough).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if h.graph is not g and h.graph != g:
        raise ValueError("heat operator does not belong to the given graph")
    if h.dirichlet_domain is not None:
        raise ValueError("the cutoff construction needs the full-graph semigroup")
    s_idx = [g.index(v) for v in S]
    u_idx = [g.index(v) for v in U]

    profile = curvature_profile(g, math.inf)
    if profile.global_curvature < -CURVATURE_TOL:
        raise PreconditionError(
            "graph violates CD(0, infinity): global curvature "
            f"{profile.global_curvature:.6g} < 0"
        )

    t = 2.0 / epsilon
    ones_u = np.zeros(g.num_vertices)
    ones_u[u_idx] = 1.0
    pt_ones_u = h.apply_array(t, ones_u)
    if s_idx:
        worst = float(np.min(pt_ones_u[s_idx]))
        if worst < 0.75 - 1e-12:
            raise PreconditionError(
                f"P_t 1_U = {worst:.6g} < 3/4 on the target set; U is too small "
                f"for this epsilon"
            )
    eta = np.minimum(1.0, np.maximum(2.0 * pt_ones_u - 0.5, 0.0))
    gam_eta = gamma_array(g, eta, eta)
    max_gamma = float(np.max(gam_eta)) if gam_eta.size else 0.0
    return CutoffResult(
        eta=GraphFunction(g, eta),
        target_set=frozenset(str(v) for v in S),
        epsilon=float(epsilon),
        max_gamma=max_gamma,
    )


def finiteness_probe(
    g: WeightedGraph,
    K: float,
    epsilon_grid: Sequence[float],
    seed: int = 0,
    jensen_samples: int = 100,
) -> dict:
    """Quantify the cutoff/curvature obstruction to infinite measure.

    Under a positive curvature bound K, a cutoff with eta(x) = 1 and
    Gamma(eta) < epsilon forces 1 <= sqrt(2 epsilon Deg(x)) / K, so any
    epsilon below K^2 / (2 Deg(x)) yields a contradiction.  On a finite
    graph (finite measure is automatic) the probe documents the thresholds
    and also samples the Jensen step (Delta g)^2 <= 2 Deg(x) Gamma(g)(x)
    that the argument relies on.
    """
    if not (K > 0):
        raise ValueError("K must be positive")
    if not is_connected(g):
        raise PreconditionError("finiteness probe requires a connected graph")
    profile = curvature_profile(g, math.inf)
    if profile.global_curvature < K - CURVATURE_TOL:
        raise PreconditionError(
            f"curvature profile minimum {profile.global_curvature:.6g} is below "
            f"the requested bound {K:.6g}"
        )

    rng = np.random.default_rng(seed)
    samples = rng.uniform(-1.0, 1.0, (g.num_vertices, jensen_samples))
    lap = laplacian_array(g, samples)
    gam = gamma_array(g, samples, samples)
    deg = g.weighted_degrees
    jensen_violation = float(np.max(lap * lap - 2.0 * deg[:, None] * gam, initial=0.0))

    per_vertex = []
    for i, v in enumerate(g.vertices):
        d = float(deg[i])
        vacuous = d == 0.0
        threshold = math.inf if vacuous else K * K / (2.0 * d)
        entries = []
        for eps in epsilon_grid:
            eps = float(eps)
            bound = math.sqrt(2.0 * eps * d) / K
            entries.append(
                {
                    "epsilon": eps,
                    "bound": bound,
                    "forces_contradiction": (not vacuous) and bound < 1.0,
                }
            )
        per_vertex.append(
            {
                "vertex": v,
                "degree": d,
                "epsilon_threshold": threshold,
                "vacuous": vacuous,
                "entries": entries,
            }
        )
    return {
        "curvature_bound": float(K),
        "total_measure": float(np.sum(g.measure_vector)),
        "jensen_max_violation": jensen_violation,
        "per_vertex": per_vertex,
    }


# -- small-t Taylor coefficients ---------------------------------------------


def _richardson_limit(seq: Sequence[float]) -> float:
    """Extrapolate g(t0 / 2^j) -> g(0) for g with a power series error."""
    row = list(seq)
    k = 1
    while len(row) > 1:
        fac = 2.0**k
        row = [(fac * row[j + 1] - row[j]) / (fac - 1.0) for j in range(len(row) - 1)]
        k += 1
    return row[0]


def taylor_check(
    g: WeightedGraph,
    f: GraphFunction,
    x: str,
    K: float = 0.5,
    heat_op: HeatOperator | None = None,
    t0: float = 0.1,
    levels: int = 7,
) -> dict:
    """Fit small-t expansion coefficients and compare with exact operators.

    The variance t -> (P_t f^2 - (P_t f)^2)(x) expands as
    2t Gamma(f) + t^2 (Delta Gamma(f) + 2 Gamma(f, Delta f)) + O(t^3); the
    two bound-side terms expand as 2t Gamma(f) + 2t^2 (Delta Gamma(f)
    + K Gamma(f)) for the heat-of-gradient side and 2t Gamma(f)
    + 2t^2 (2 Gamma(f, Delta f) - K Gamma(f)) for the gradient-of-heat
    side.  First and second order coefficients are fitted by Richardson
    extrapolation on a halving t-grid.
    """
    _check_graph_function(g, f)
    if float(np.min(f.array)) < 0:
        raise ValueError("f must be nonnegative")
    if heat_op is None:
        heat_op = build_heat(g)
    ix = g.index(x)

    farr = f.array
    gam_f = gamma_array(g, farr, farr)
    lap_f = laplacian_array(g, farr)
    lap_gam_f = laplacian_array(g, gam_f)
    gam_f_lapf = gamma_array(g, farr, lap_f)

    exact_c1 = 2.0 * float(gam_f[ix])
    exact_c2 = float(lap_gam_f[ix] + 2.0 * gam_f_lapf[ix])
    exact_upper_c2 = 2.0 * float(lap_gam_f[ix] + K * gam_f[ix])
    exact_lower_c2 = 2.0 * float(2.0 * gam_f_lapf[ix] - K * gam_f[ix])

    ts = [t0 / 2.0**j for j in range(levels)]

    def fit(series: list[float]) -> tuple[float, float]:
        c1 = _richardson_limit([v / t for v, t in zip(series, ts)])
        c2 = _richardson_limit([(v - c1 * t) / (t * t) for v, t in zip(series, ts)])
        return c1, c2

    variance = [
        float((heat_op.apply_array(t, farr * farr) - heat_op.apply_array(t, farr) ** 2)[ix])
        for t in ts
    ]
    heat_of_gradient = [
        _ratio_plus(K, t) * float(heat_op.apply_array(t, gam_f)[ix]) for t in ts
    ]
    gradient_of_heat = []
    for t in ts:
        ptf = heat_op.apply_array(t, farr)
        gradient_of_heat.append(_ratio_minus(K, t) * float(gamma_array(g, ptf, ptf)[ix]))

    var_c1, var_c2 = fit(variance)
    up_c1, up_c2 = fit(heat_of_gradient)
    low_c1, low_c2 = fit(gradient_of_heat)

    return {
        "vertex": x,
        "K": float(K),
        "variance": {
            "first_order": {"fitted": var_c1, "exact": exact_c1},
            "second_order": {"fitted": var_c2, "exact": exact_c2},
        },
        "heat_of_gradient": {
            "first_order": {"fitted": up_c1, "exact": exact_c1},
            "second_order": {"fitted": up_c2, "exact": exact_upper_c2},
        },
        "gradient_of_heat": {
            "first_order": {"fitted": low_c1, "exact": exact_c1},
            "second_order": {"fitted": low_c2, "exact": exact_lower_c2},
        },
    }
