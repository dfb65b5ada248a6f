"""Cache-intensity minimization: single-variable closed forms, the geometric
program for the joint problem, and a brute-force grid oracle.

The joint problem min lambda*S subject to the linearized delay cap reduces,
for large caches (t = S+1 ~ S), to a geometric program with degree of
difficulty one.  Its dual collapses to a one-dimensional concave maximization
over r in [0, 1], solved by golden-section search on the log objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .delay import DelayConstraint, TrafficParams
from .errors import DomainError, InfeasibleError, UnsupportedRegimeError
from .popularity import ZipfCatalog, _harmonic_cached, riemann_zeta


@dataclass(frozen=True)
class GPConstants:
    """Constants of the expanded delay cap E[D] = c1 + c2/lambda + c3*(S+1)^(1-v)
    and their normalized forms Q, V (delay constraint) and R (density bound)."""

    c1: float
    c2: float
    c3: float
    q_const: float
    v_const: float
    r_const: float


@dataclass(frozen=True)
class CacheSizeResult:
    size: float
    size_int: int
    clamped_to_catalog: bool


@dataclass(frozen=True)
class JointSolution:
    bs_intensity: float
    cache_size: float
    cache_size_int: int
    dual_optimum: float
    dual_coordinate: float
    cache_intensity: float
    boundary: str  # "interior" | "r_equals_1"
    residual_delay: float
    residual_density: float
    cache_clamped: bool
    bs_intensity_literal: float
    cache_size_literal: float
    duality_gap_literal: float


def markov_linearize(constraint: DelayConstraint) -> float:
    """Expected-delay cap implied by the probabilistic constraint."""
    return constraint.expected_delay_cap


def constant_C(fronthaul_s: float, backhaul_s: float, constraint: DelayConstraint) -> float:
    """Required hit probability: delay cap holds iff P_hit(S) >= C."""
    if backhaul_s <= 0:
        raise DomainError(f"backhaul delay must be > 0, got {backhaul_s}")
    return 1.0 - (constraint.expected_delay_cap - fronthaul_s) / backhaul_s


def optimal_cache_fixed_lambda(c_value: float, catalog: ZipfCatalog) -> CacheSizeResult:
    """Smallest cache meeting the delay cap at a fixed station intensity.

    Inverts the asymptotic hit probability at the required level `c_value`;
    rounds up, since hit probability increases with cache size.
    """
    nu = catalog.exponent
    if nu == 1.0 or nu <= 0:
        raise DomainError(f"exponent must be > 0 and != 1, got {nu}")
    if c_value > 1.0:
        raise InfeasibleError(
            f"required hit probability {c_value:.6g} exceeds 1; the station "
            "intensity is below the feasibility bound"
        )
    h_catalog = _harmonic_cached(catalog.files, nu)
    base = (nu - 1.0) * (riemann_zeta(nu) - c_value * h_catalog)
    if base <= 0:
        raise DomainError(
            f"(v-1)*(zeta(v) - C*H_F) = {base:.6g} <= 0; the asymptotic "
            "inversion has no real solution for these inputs"
        )
    size = base ** (1.0 / (1.0 - nu)) - 1.0
    clamped = size > catalog.files
    size_int = min(catalog.files, max(0, math.ceil(size)))
    return CacheSizeResult(size, size_int, clamped)


def optimal_lambda_fixed_cache(
    traffic: TrafficParams,
    goodput_bps: float,
    backhaul_s: float,
    hit_probability: float,
    constraint: DelayConstraint,
) -> float:
    """Smallest station intensity meeting the delay cap at a fixed cache size."""
    denom = constraint.expected_delay_cap - backhaul_s * (1.0 - hit_probability)
    if denom <= 0:
        raise InfeasibleError(
            "P_hit(S) > 1 - cap/backhaul is violated "
            f"(hit={hit_probability:.6g}, needs > {1.0 - constraint.expected_delay_cap / backhaul_s:.6g})"
        )
    return (
        traffic.ue_activity * traffic.ue_intensity * traffic.file_size_bits
        / (goodput_bps * denom)
    )


def gp_constants(
    catalog: ZipfCatalog,
    traffic: TrafficParams,
    goodput_bps: float,
    backhaul_s: float,
    constraint: DelayConstraint,
) -> GPConstants:
    """Constants of the geometric program built from the delay expansion."""
    nu = catalog.exponent
    if nu == 1.0 or nu <= 0:
        raise DomainError(f"exponent must be > 0 and != 1, got {nu}")
    h_catalog = _harmonic_cached(catalog.files, nu)
    c1 = backhaul_s * (1.0 - riemann_zeta(nu) / h_catalog)
    c2 = traffic.ue_activity * traffic.ue_intensity * traffic.file_size_bits / goodput_bps
    c3 = backhaul_s / ((nu - 1.0) * h_catalog)
    cap = constraint.expected_delay_cap
    if cap - c1 <= 0:
        raise InfeasibleError(
            f"delay cap {cap:.6g} s does not exceed the irreducible offset {c1:.6g} s"
        )
    return GPConstants(c1, c2, c3, c2 / (cap - c1), c3 / (cap - c1), c2 / cap)


def _require_positive(k: GPConstants, nu: float) -> None:
    if nu <= 1.0:
        raise UnsupportedRegimeError(
            f"joint optimization needs exponent > 1 for a positive cache size, got {nu}"
        )
    if k.q_const <= 0 or k.v_const <= 0 or k.r_const <= 0:
        raise InfeasibleError(
            f"constants must be positive (Q={k.q_const:.6g}, V={k.v_const:.6g}, R={k.r_const:.6g})"
        )


def _log_dual(r: float, k: GPConstants, nu: float, printed_form: bool = False) -> float:
    c = 1.0 / (nu - 1.0)
    first = r * (math.log(k.q_const) - math.log(r)) if r > 0.0 else 0.0
    mid = (r + c) * math.log(r + c)
    if printed_form:
        last = (1.0 - r) * math.log(1.0 - r) if r < 1.0 else 0.0
        return first + (nu - 1.0) * math.log(k.v_const / (nu - 1.0)) + mid + last
    return first + (1.0 - r) * math.log(k.r_const) + c * math.log(k.v_const * (nu - 1.0)) + mid


def dual_objective(
    r: float, constants: GPConstants, exponent: float, printed_form: bool = False
) -> float:
    """Dual function q(r) on [0, 1]; log-concave, with 0^0-style limits at the ends.

    The default is the derivation-consistent form; `printed_form` evaluates the
    source's reduced expression for comparison runs.
    """
    _require_positive(constants, exponent)
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"dual coordinate must lie in [0, 1], got {r}")
    return math.exp(_log_dual(r, constants, exponent, printed_form))


def dual_log_derivative(r: float, constants: GPConstants, exponent: float) -> float:
    """d log q / dr = log(Q/R) + log(1 + 1/(r(v-1))); decreasing in r."""
    _require_positive(constants, exponent)
    if not 0.0 < r <= 1.0:
        raise DomainError(f"dual coordinate must lie in (0, 1], got {r}")
    return math.log(constants.q_const / constants.r_const) + math.log1p(
        1.0 / (r * (exponent - 1.0))
    )


def monotonicity_shortcut(constants: GPConstants, exponent: float) -> Optional[float]:
    """If q is increasing up to r=1, return the boundary optimum q(1), else None."""
    _require_positive(constants, exponent)
    condition = math.log(
        exponent * constants.q_const / (constants.r_const * (exponent - 1.0))
    )
    if condition > 0.0:
        return dual_objective(1.0, constants, exponent)
    return None


def golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10
) -> tuple[float, float]:
    """Maximize a unimodal function on [lo, hi] to bracket width `tol`."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def _constraint_load(k: GPConstants, nu: float, t: float) -> float:
    return k.v_const * t ** (1.0 - nu)


def _polish_candidate(
    k: GPConstants, nu: float, t: float, catalog_files: int
) -> Optional[tuple[float, float, bool]]:
    """Re-solve lambda for a fixed transformed cache size t, smallest feasible.

    Returns (lambda, t, clamped) or None when no lambda can satisfy the cap
    at this t.
    """
    clamped = t > catalog_files + 1.0
    t = min(max(t, 1.0), catalog_files + 1.0)
    load = _constraint_load(k, nu, t)
    if load >= 1.0:
        return None
    lam = max(k.q_const / (1.0 - load), k.r_const)
    return lam, t, clamped


def solve_joint(constants: GPConstants, exponent: float, catalog_files: int) -> JointSolution:
    """Jointly optimal (station intensity, cache size) minimizing cache intensity.

    Maximizes the dual over r (boundary shortcut first, golden-section
    otherwise), then recovers primal variables.  The source's literal recovery
    relations are evaluated and reported, but the returned point is the best
    feasibility-polished candidate, which also includes the duality-consistent
    recovery (lambda = R at an interior optimum, lambda = Q*v/(v-1) at r = 1).
    """
    _require_positive(constants, exponent)
    nu = exponent
    c = 1.0 / (nu - 1.0)
    q_boundary = monotonicity_shortcut(constants, nu)
    if q_boundary is not None:
        r_star, q_star, boundary = 1.0, q_boundary, "r_equals_1"
    else:
        r_star, log_q = golden_section_max(
            lambda r: _log_dual(r, constants, nu), 1e-9, 1.0 - 1e-9, tol=1e-10
        )
        q_star, boundary = math.exp(log_q), "interior"

    lam_literal = (constants.q_const + constants.r_const) / q_star
    t_literal = (constants.v_const * (nu - 1.0) / q_star) ** c
    gap_literal = abs(lam_literal * t_literal - q_star) / q_star

    if boundary == "r_equals_1":
        lam_dual = constants.q_const * nu / (nu - 1.0)
    else:
        lam_dual = constants.r_const
    t_dual = q_star / lam_dual

    best: Optional[tuple[float, float, bool]] = None
    for t_candidate in (t_literal, t_dual):
        polished = _polish_candidate(constants, nu, t_candidate, catalog_files)
        if polished is None:
            continue
        if best is None or polished[0] * polished[1] < best[0] * best[1]:
            best = polished
    if best is None:
        raise InfeasibleError(
            "no feasible (lambda, S) recovered; the delay cap cannot be met "
            f"with S <= {catalog_files}"
        )
    lam, t, clamped = best
    load = _constraint_load(constants, nu, t)
    cache_size = t - 1.0
    return JointSolution(
        bs_intensity=lam,
        cache_size=cache_size,
        cache_size_int=min(catalog_files, max(0, math.ceil(cache_size))),
        dual_optimum=q_star,
        dual_coordinate=r_star,
        cache_intensity=lam * cache_size,
        boundary=boundary,
        residual_delay=constants.q_const / lam + load - 1.0,
        residual_density=constants.r_const / lam - 1.0,
        cache_clamped=clamped,
        bs_intensity_literal=lam_literal,
        cache_size_literal=t_literal - 1.0,
        duality_gap_literal=gap_literal,
    )


@dataclass(frozen=True)
class GridSpec:
    """Resolution of the brute-force search box."""

    bs_points: int = 60
    cache_points: int = 60
    bs_span: float = 1e4
    zoom_points: int = 80


@dataclass(frozen=True)
class OracleResult:
    bs_intensity: float
    cache_size: int
    objective: float
    residual_delay: float
    feasible_points: int


def _grid_best(
    k: GPConstants, nu: float, lams: np.ndarray, caches: np.ndarray
) -> Optional[tuple[int, int, float, int]]:
    load = k.v_const * (caches + 1.0) ** (1.0 - nu)
    feasible = (k.q_const / lams[:, None] + load[None, :]) <= 1.0 + 1e-12
    n_feasible = int(feasible.sum())
    if n_feasible == 0:
        return None
    objective = np.where(feasible, lams[:, None] * caches[None, :], np.inf)
    flat = int(np.argmin(objective))  # row-major argmin gives (lambda, S) lexicographic ties
    i, j = divmod(flat, caches.size)
    return i, j, float(objective[i, j]), n_feasible


def brute_force_oracle(
    constants: GPConstants,
    exponent: float,
    catalog_files: int,
    grid: GridSpec = GridSpec(),
    catalog: Optional[ZipfCatalog] = None,
) -> OracleResult:
    """Exhaustive minimizer of lambda*S over the feasibility region, with one
    local grid-zoom pass; ground truth for the joint solution.

    Feasibility uses the asymptotic delay expansion (the one the geometric
    program is built on).  When a catalog is supplied, the residual at the
    winning point is also checked against the exact hit probability and the
    tighter of the two residuals is reported.
    """
    _require_positive(constants, exponent)
    lam_lo = constants.r_const
    lams = np.geomspace(lam_lo, lam_lo * grid.bs_span, grid.bs_points)
    caches = np.unique(np.geomspace(1, catalog_files, grid.cache_points).astype(np.int64))
    hit = _grid_best(constants, exponent, lams, caches.astype(np.float64))
    if hit is None:
        raise InfeasibleError(
            "empty feasible set on the search box; the station-intensity lower "
            f"bound {lam_lo:.6g} per m^2 leaves no slack for any cache size <= {catalog_files}"
        )
    i, j, _, n_feasible = hit

    lam_win = lams[max(0, i - 1)], lams[min(lams.size - 1, i + 1)]
    cache_win = caches[max(0, j - 1)], caches[min(caches.size - 1, j + 1)]
    lams_z = np.geomspace(lam_win[0], lam_win[1], grid.zoom_points)
    caches_z = np.unique(
        np.linspace(cache_win[0], cache_win[1], grid.zoom_points).astype(np.int64)
    )
    hit_z = _grid_best(constants, exponent, lams_z, caches_z.astype(np.float64))
    assert hit_z is not None  # winner of the coarse pass is inside the window
    iz, jz, objective, _ = hit_z
    lam_best, cache_best = float(lams_z[iz]), int(caches_z[jz])

    residual = (
        constants.q_const / lam_best
        + constants.v_const * (cache_best + 1.0) ** (1.0 - exponent)
        - 1.0
    )
    if catalog is not None:
        from .popularity import CacheConfig, hit_probability_exact

        cap_scale = constants.c2 / constants.r_const  # = gamma * D_th
        backhaul = constants.c3 * (exponent - 1.0) * _harmonic_cached(
            catalog.files, exponent
        )
        exact_delay = constants.c2 / lam_best + backhaul * (
            1.0 - hit_probability_exact(catalog, CacheConfig(cache_best))
        )
        residual = min(residual, exact_delay / cap_scale - 1.0)
    return OracleResult(lam_best, cache_best, objective, residual, n_feasible)
