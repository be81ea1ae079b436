"""Location, refinement and classification of all equilibrium families.

Four families are searched:

* tumor_free:  T = 0, N > 0
* dead1:       N = T = 0
* dead2:       N = 0, T > 0
* coexisting:  all five components > 0

Every family shares the estrogen component E* = p(1-k)/theta because the
estrogen equation is linear and decoupled.  The authoritative method is
"derive the reduced equations + Newton on the steady subsystem"; the
printed closed-form polynomials are kept only as seeds and cross-checks
(see :func:`reduced_polynomials` and its mismatch report).

A note on the tumor-free family: with T = 0 the tumor equation still
carries the transformation feed l1*N*E*(1-k), so the classical tumor-free
point is an exact equilibrium only when that feed vanishes (k = 1, l1 = 0
or p = 0).  The finder always reports the closed-form candidate together
with its true residual; only candidates whose full residual is below
1e-10 count as confirmed.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    DENOM_GUARD,
    DomainError,
    ModelParams,
    SystemState,
    jacobian,
    residual_norm,
    rhs,
    validate_params,
)
from .numerics import NewtonError, Polynomial, newton_solve, poly_roots

__all__ = [
    "FAMILIES",
    "CONFIRM_TOL",
    "Equilibrium",
    "ReducedPolynomials",
    "estrogen_level",
    "immune_clearance_rate",
    "drug_level",
    "tumor_free",
    "dead_type1",
    "dead_type2",
    "coexisting",
    "find_all",
    "reduced_polynomials",
    "catalog_to_json",
    "catalog_to_csv",
]

log = logging.getLogger(__name__)

FAMILIES = ("tumor_free", "dead1", "dead2", "coexisting")

#: An equilibrium counts as confirmed when ||rhs||_inf is below this.
CONFIRM_TOL = 1e-10
#: Components in (-SNAP_TOL, 0) are snapped to zero before classification.
SNAP_TOL = 1e-9
#: Relative infinity-norm distance below which two points are duplicates.
DEDUP_TOL = 1e-6

_GRID_POINTS = 16


@dataclass(frozen=True)
class Equilibrium:
    """A candidate steady state with its family tag, true residual and the
    named existence-condition flags (with the quantities they compare)."""

    point: SystemState
    family: str
    residual: float
    existence_flags: dict[str, bool] = field(default_factory=dict)
    flag_values: dict[str, float] = field(default_factory=dict)
    provenance: str = "newton_refined"

    @property
    def confirmed(self) -> bool:
        return self.residual < CONFIRM_TOL


@dataclass(frozen=True)
class ReducedPolynomials:
    """Reduced steady-state polynomials: the derived dead1 quadratic in I,
    the printed variants, and the per-coefficient mismatch between the
    derived and printed dead1 forms (both normalized to unit max-abs
    coefficient before comparison)."""

    dead1_quadratic: Polynomial
    dead1_quadratic_paper: Polynomial
    dead2_cubic: Polynomial | None
    coexist_quadratic: Polynomial | None
    mismatch_report: dict[str, object]


def estrogen_level(params: ModelParams) -> float:
    """Shared estrogen component E* = p(1-k)/theta of every equilibrium."""
    return params.p * (1.0 - params.k) / params.theta


def immune_clearance_rate(params: ModelParams, E: float) -> float:
    """Total linear loss rate of immune cells at T = 0:
    m + l3*E*(1-k)/(g+E)."""
    return params.m + params.l3 * E * (1.0 - params.k) / (params.g + E)


def drug_level(params: ModelParams, I: float) -> float | None:
    """Steady drug level M(I) = v_M (xi+I) / (n_M (xi+I) - chi I), or None
    when the denominator is not safely positive (the drug compartment has
    no finite positive steady state there)."""
    den = params.n_M * (params.xi + I) - params.chi * I
    if den < DENOM_GUARD:
        return None
    return params.v_M * (params.xi + I) / den


def _dead1_quadratic_derived(params: ModelParams) -> tuple[float, float, float]:
    """Quadratic in I obtained by substituting M(I) into the steady immune
    equation at N = T = 0 and clearing denominators.  Descending order."""
    E = estrogen_level(params)
    A = immune_clearance_rate(params, E)
    q0 = params.xi * (params.j_M * params.n_M + params.v_M)
    q1 = params.j_M * (params.n_M - params.chi) + params.v_M
    c2 = params.p_M * params.v_M - A * q1
    c1 = params.s * q1 - A * q0 + params.p_M * params.v_M * params.xi
    c0 = params.s * q0
    return (c2, c1, c0)


def _dead1_quadratic_printed(params: ModelParams) -> tuple[float, float, float]:
    """The printed dead1 quadratic, transcribed as printed (it omits j_M
    entirely; kept for the mismatch report and as a seed)."""
    E = estrogen_level(params)
    A = immune_clearance_rate(params, E)
    c2 = A * params.chi + params.p_M * params.v_M
    c1 = -(A * params.n_M - params.p_M * params.v_M * params.xi + params.s * params.chi)
    c0 = params.s * params.n_M
    return (c2, c1, c0)


def printed_dead2_cubic(params: ModelParams, I: float) -> Polynomial | None:
    """The printed cubic in T for the dead type-2 family, transcribed as
    printed, with its C term evaluated at the trial immune level ``I``.
    Used only for seeding; the solver works on the steady subsystem."""
    M = drug_level(params, I)
    if M is None:
        return None
    E = estrogen_level(params)
    C = (
        params.l3 * E * (1.0 - params.k) / (params.g + E)
        - params.p_M * M / (params.j_M + M)
    )
    a2d = params.a2 * params.d
    b2, g2, m, r, o = params.b2, params.g2, params.m, params.r, params.o
    m_d, g1, s, theta = params.m_d, params.g1, params.s, params.theta
    c3 = b2 * g2
    c2 = b2 * m + b2 * g2 * o - b2 * r + b2 * C - a2d * g2 - a2d * C + m_d * g2
    c1 = (
        b2 * m * o + b2 * C * o - a2d * m - a2d * g2 * o + r * a2d - a2d * o * C
        + g1 * s + m_d * m + m_d * g2 * theta - r * m_d + m_d * C
    )
    c0 = m_d * C * o + m_d * m * o + g1 * s * o - a2d * m * o
    if c3 == 0.0:
        return None
    return Polynomial((c3, c2, c1, c0))


def coexist_quadratic(params: ModelParams, N_e: float, E_e: float) -> Polynomial:
    """Quadratic in T for the coexisting family at given N_e, E_e:
    b2*T^2 + (g1*I_e + m_d - a2*d)*T - l1*N_e*E_e*(1-k) with the I-dependent
    middle coefficient left to the caller through its sign analysis; here
    the I-free parts are assembled for the b/c sign-case bookkeeping."""
    b = params.m_d - params.a2 * params.d  # g1*I_e added by the caller
    c = -params.l1 * N_e * E_e * (1.0 - params.k)
    return Polynomial((params.b2, b, c))


def reduced_polynomials(
    params: ModelParams,
    dead2_trial_I: float | None = None,
    coexist_N: float | None = None,
) -> ReducedPolynomials:
    """Assemble the reduced polynomials and the derived-vs-printed dead1
    mismatch report.  Emitted on every equilibrium run."""
    derived = _dead1_quadratic_derived(params)
    printed = _dead1_quadratic_printed(params)

    def normalized(coeffs):
        scale = max(abs(c) for c in coeffs)
        return [c / scale for c in coeffs] if scale > 0 else list(coeffs)

    nd, npr = normalized(derived), normalized(printed)
    deviations = {
        f"I^{2 - i}": abs(a - b) / max(1.0, abs(a)) for i, (a, b) in enumerate(zip(nd, npr))
    }
    report = {
        "coefficient_deviations": deviations,
        "printed_form_confirmed": all(v < 1e-12 for v in deviations.values()),
        "notes": [
            "derived quadratic from M(I) substituted into the steady immune equation governs",
            "printed form omits j_M and is kept for reference only",
            "xi_i / xi_1 subscripts in the printed dead1 and type-1 stability formulas are read as the single parameter xi",
        ],
    }
    dead2 = printed_dead2_cubic(params, dead2_trial_I) if dead2_trial_I is not None else None
    coexist = (
        coexist_quadratic(params, coexist_N, estrogen_level(params))
        if coexist_N is not None
        else None
    )

    def as_poly(coeffs):
        if coeffs[0] == 0.0:
            coeffs = (1e-300, *coeffs[1:])  # keep a degenerate quadratic representable
        return Polynomial(coeffs)

    return ReducedPolynomials(
        dead1_quadratic=as_poly(derived),
        dead1_quadratic_paper=as_poly(printed),
        dead2_cubic=dead2,
        coexist_quadratic=coexist,
        mismatch_report=report,
    )


def _quadratic_positive_roots(coeffs: tuple[float, float, float]) -> list[float]:
    c2, c1, c0 = coeffs
    scale = max(abs(c2), abs(c1), abs(c0), 1e-300)
    if abs(c2) <= 1e-14 * scale:
        if abs(c1) <= 1e-14 * scale:
            return []
        root = -c0 / c1
        return [root] if root > 0 else []
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    # Numerically stable quadratic formula.
    q = -0.5 * (c1 + math.copysign(sq, c1)) if c1 != 0 else 0.5 * sq
    roots = []
    if q != 0:
        roots = [q / c2, c0 / q]
    else:
        roots = [0.0, -c1 / c2]
    return sorted({r for r in roots if r > 0})


def _subsystem(params: ModelParams, active: tuple[int, ...], template: list[float]):
    """Steady-state residual and Jacobian restricted to ``active`` state
    indices, with the remaining components frozen at ``template``."""

    def assemble(x: np.ndarray) -> SystemState:
        vals = list(template)
        for idx, xi in zip(active, x):
            vals[idx] = float(xi)
        return SystemState.from_sequence(vals)

    def F(x: np.ndarray) -> np.ndarray:
        full = rhs(assemble(x), params)
        return np.array([full[i] for i in active])

    def J(x: np.ndarray) -> np.ndarray:
        full = jacobian(assemble(x), params)
        return full[np.ix_(active, active)]

    return assemble, F, J


def _dedup(points: list[SystemState]) -> list[SystemState]:
    kept: list[SystemState] = []
    for pt in points:
        arr = pt.as_array()
        scale = 1.0 + float(np.max(np.abs(arr)))
        if all(
            float(np.max(np.abs(arr - q.as_array()))) / scale > DEDUP_TOL for q in kept
        ):
            kept.append(pt)
    return kept


def _snap(point: SystemState) -> SystemState:
    return SystemState.from_sequence(
        0.0 if -SNAP_TOL < v < 0.0 else v for v in point.as_tuple()
    )


def _im_candidates(params: ModelParams) -> list[tuple[float, float]]:
    """Admissible steady (I, M) pairs of the immune/drug subsystem at
    N = T = 0: positive roots of the derived quadratic, Newton-refined on
    the 2-D subsystem."""
    E = estrogen_level(params)
    derived = _dead1_quadratic_derived(params)
    candidates = []
    for I0 in _quadratic_positive_roots(derived):
        M0 = drug_level(params, I0)
        if M0 is None:
            continue
        assemble, F, J = _subsystem(params, (2, 4), [0.0, 0.0, I0, E, M0])
        try:
            sol = newton_solve(F, J, np.array([I0, M0]), tol=1e-13)
        except NewtonError as exc:
            log.debug("immune/drug refinement failed from I=%g: %s", I0, exc)
            continue
        I_ref, M_ref = float(sol[0]), float(sol[1])
        if I_ref > 0 and M_ref > 0 and drug_level(params, I_ref) is not None:
            candidates.append((I_ref, M_ref))
    # Deduplicate refined pairs.
    unique: list[tuple[float, float]] = []
    for cand in candidates:
        if all(
            max(abs(cand[0] - u[0]), abs(cand[1] - u[1])) / (1.0 + abs(cand[0]) + abs(cand[1]))
            > DEDUP_TOL
            for u in unique
        ):
            unique.append(cand)
    return unique


def _tumor_free_flags(params: ModelParams, I0: float, M0: float, E0: float):
    pm = params
    omk = 1.0 - pm.k
    flags: dict[str, bool] = {}
    values: dict[str, float] = {}

    bound_i = pm.a1 / (pm.l1 * omk) if pm.l1 * omk > 0 else math.inf
    flags["estrogen_within_bound"] = E0 <= bound_i and pm.k < 1.0
    values["estrogen_bound"] = bound_i

    bound_ii = pm.m / pm.p_M if pm.p_M > 0 else math.inf
    flags["drug_within_bound"] = M0 <= bound_ii
    values["drug_bound"] = bound_ii

    if pm.chi > pm.n_M:
        bound_iii = pm.n_M * pm.xi / (pm.chi - pm.n_M)
    else:
        bound_iii = math.inf
    flags["immune_within_bound"] = I0 <= bound_iii
    values["immune_bound"] = bound_iii

    # One printed existence bound uses an ambiguous growth-rate symbol; both the
    # a1 and a2 readings are evaluated and reported.
    if omk > 0:
        bound_iv_a1 = pm.theta * pm.a1 / (pm.p * omk**2) if pm.p > 0 else math.inf
        bound_iv_a2 = pm.theta * pm.a2 / (pm.p * omk**2) if pm.p > 0 else math.inf
    else:
        bound_iv_a1 = bound_iv_a2 = math.inf
    flags["l1_within_bound_a1"] = pm.l1 <= bound_iv_a1
    flags["l1_within_bound_a2"] = pm.l1 <= bound_iv_a2
    values["l1_bound_a1"] = bound_iv_a1
    values["l1_bound_a2"] = bound_iv_a2
    flags["k_lt_1"] = pm.k < 1.0
    return flags, values


def tumor_free(params: ModelParams) -> list[Equilibrium]:
    """Tumor-free candidates: N and E in closed form, (I, M) from the
    immune/drug subsystem.  The reported residual includes the tumor
    equation's transformation feed (see module docstring)."""
    _check(params)
    E0 = estrogen_level(params)
    N0 = (params.a1 - params.l1 * E0 * (1.0 - params.k)) / params.b1
    if N0 <= 0:
        log.debug("no tumor-free candidate: closed-form N = %g <= 0", N0)
        return []
    results = []
    for I0, M0 in _im_candidates(params):
        point = SystemState(N0, 0.0, I0, E0, M0)
        flags, values = _tumor_free_flags(params, I0, M0, E0)
        feed = params.l1 * N0 * E0 * (1.0 - params.k)
        flags["tumor_feed_zero"] = abs(feed) < CONFIRM_TOL
        values["tumor_feed"] = feed
        results.append(
            Equilibrium(
                point=point,
                family="tumor_free",
                residual=residual_norm(point, params),
                existence_flags=flags,
                flag_values=values,
                provenance="closed_form" if params.chi == 0 and params.p_M == 0 else "newton_refined",
            )
        )
    return results


def dead_type1(params: ModelParams) -> list[Equilibrium]:
    """Dead type-1 equilibria: N = T = 0, I from the derived quadratic,
    M = M(I), refined on the immune/drug subsystem."""
    _check(params)
    E = estrogen_level(params)
    derived = _dead1_quadratic_derived(params)
    c2, c1, c0 = derived
    if abs(c2) > 1e-14 * max(abs(c1), abs(c0), 1.0):
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0:
            log.debug("dead1: negative discriminant %g of the derived quadratic", disc)
            return []
    A = immune_clearance_rate(params, E)
    results = []
    for I0, M0 in _im_candidates(params):
        point = SystemState(0.0, 0.0, I0, E, M0)
        flags: dict[str, bool] = {}
        values: dict[str, float] = {}
        den = params.s * params.chi * A * params.n_M
        ratio = (
            params.p_M * params.v_M * params.xi / den if abs(den) > DENOM_GUARD else math.inf
        )
        flags["drug_feed_ratio_lt_1"] = ratio < 1.0
        values["drug_feed_ratio"] = ratio
        flags["partial_blockade"] = params.k < 1.0
        production = params.chi * I0 / (params.xi + I0)
        flags["drug_clearance_dominates"] = params.n_M >= production
        values["drug_production_rate"] = production
        results.append(
            Equilibrium(
                point=point,
                family="dead1",
                residual=residual_norm(point, params),
                existence_flags=flags,
                flag_values=values,
                provenance="poly_root",
            )
        )
    return results


def _dead2_scalar_residual(params: ModelParams, T: float) -> float | None:
    """Steady immune-equation residual along the dead2 slice, with I
    eliminated through the tumor equation and M through the drug equation."""
    a2d = params.a2 * params.d
    I = (a2d - params.b2 * T - params.m_d) / params.g1
    if I < 0:
        return None
    M = drug_level(params, I)
    if M is None:
        return None
    E = estrogen_level(params)
    state = SystemState(0.0, T, I, E, M)
    return rhs(state, params)[2]


def dead_type2(params: ModelParams) -> list[Equilibrium]:
    """Dead type-2 equilibria: N = 0, T > 0, solved on the (T, I, M)
    steady subsystem by Newton from multi-start seeds (printed cubic
    roots plus grid brackets of the reduced scalar equation)."""
    _check(params)
    if params.g1 <= 0:
        log.debug("dead2: finder requires g1 > 0")
        return []
    a2d = params.a2 * params.d
    T_max = (a2d - params.m_d) / params.b2
    if T_max <= 0:
        return []
    E = estrogen_level(params)

    seeds: list[float] = []
    grid = np.exp(
        np.linspace(math.log(T_max * 1e-4), math.log(T_max), _GRID_POINTS)
    )
    # Seeds from the printed cubic, C evaluated at each trial immune level.
    for T_trial in grid:
        I_trial = (a2d - params.b2 * T_trial - params.m_d) / params.g1
        if I_trial < 0:
            continue
        cubic = printed_dead2_cubic(params, I_trial)
        if cubic is None:
            continue
        try:
            roots = poly_roots(cubic)
        except Exception:
            continue
        for z in roots.roots:
            if abs(z.imag) < 1e-9 and 0 < z.real <= T_max * (1 + 1e-9):
                seeds.append(float(z.real))
    # Seeds from sign changes of the reduced scalar equation.
    scan = np.linspace(T_max / 64.0, T_max, 64)
    vals = [_dead2_scalar_residual(params, float(T)) for T in scan]
    for (Ta, fa), (Tb, fb) in zip(zip(scan, vals), zip(scan[1:], vals[1:])):
        if fa is None or fb is None or fa * fb > 0:
            continue
        lo, hi, flo = float(Ta), float(Tb), fa
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            fm = _dead2_scalar_residual(params, mid)
            if fm is None:
                break
            if flo * fm <= 0:
                hi = mid
            else:
                lo, flo = mid, fm
        seeds.append(0.5 * (lo + hi))

    points: list[SystemState] = []
    for T0 in seeds:
        I0 = (a2d - params.b2 * T0 - params.m_d) / params.g1
        if I0 < 0:
            continue
        M0 = drug_level(params, max(I0, 0.0))
        if M0 is None:
            continue
        assemble, F, J = _subsystem(params, (1, 2, 4), [0.0, T0, I0, E, M0])
        try:
            sol = newton_solve(F, J, np.array([T0, I0, M0]), tol=1e-13)
        except NewtonError as exc:
            log.debug("dead2 refinement failed from T=%g: %s", T0, exc)
            continue
        T1, I1, M1 = (float(v) for v in sol)
        if T1 <= 0 or I1 < -SNAP_TOL or M1 <= 0:
            continue
        points.append(_snap(SystemState(0.0, T1, max(I1, 0.0), E, M1)))

    results = []
    for point in _dedup(points):
        flags: dict[str, bool] = {"partial_blockade": params.k < 1.0}
        values: dict[str, float] = {}
        den = params.b2 * (params.chi - params.g1 * params.n_M)
        lower = (
            T_max - params.g1**2 * params.n_M / den if abs(den) > DENOM_GUARD else -math.inf
        )
        flags["tumor_within_band"] = lower <= point.T <= T_max
        values["tumor_band_lower"] = lower
        values["tumor_band_upper"] = T_max
        results.append(
            Equilibrium(
                point=point,
                family="dead2",
                residual=residual_norm(point, params),
                existence_flags=flags,
                flag_values=values,
                provenance="newton_refined",
            )
        )
    return results


def _coexist_closed_N(params: ModelParams, T: float, E: float) -> float:
    return (
        params.a1
        - params.d1 * T / (1.0 + params.epsilon * T)
        - params.l1 * E * (1.0 - params.k)
    ) / params.b1


def coexisting(params: ModelParams) -> list[Equilibrium]:
    """Coexisting equilibria: all components positive, solved by full 5-D
    Newton from a seeded (T, I) grid with N, E, M eliminated through their
    closed forms.  An empty list is a valid outcome."""
    _check(params)
    E = estrogen_level(params)
    a2d = params.a2 * params.d
    T_hi = max(a2d / params.b2, 1e-2)
    if params.g1 > 0:
        I_hi = max((a2d - params.m_d) / params.g1, params.s / params.m)
    else:
        I_hi = params.s / params.m
    I_hi = max(I_hi, 1e-2)

    t_grid = np.exp(np.linspace(math.log(T_hi * 1e-3), math.log(T_hi), 8))
    i_grid = np.exp(np.linspace(math.log(I_hi * 1e-3), math.log(I_hi), 8))

    points: list[SystemState] = []
    for T0 in t_grid:
        N0 = _coexist_closed_N(params, float(T0), E)
        if N0 <= 0:
            continue
        for I0 in i_grid:
            M0 = drug_level(params, float(I0))
            if M0 is None:
                continue
            # E is pinned at its closed form so every family shares the
            # identical float value; the E equation is decoupled anyway.
            assemble, F, J = _subsystem(params, (0, 1, 2, 4), [N0, float(T0), float(I0), E, M0])
            try:
                sol = newton_solve(F, J, np.array([N0, T0, I0, M0]), tol=1e-13, max_iter=60)
            except (NewtonError, DomainError):
                continue
            cand = _snap(assemble(sol))
            if all(v > 0 for v in cand.as_tuple()):
                points.append(cand)

    results = []
    for point in _dedup(points):
        b = params.g1 * point.I + params.m_d - a2d
        c = -params.l1 * point.N * point.E * (1.0 - params.k)
        flags: dict[str, bool] = {}
        values: dict[str, float] = {"coexist_b": b, "coexist_c": c}
        if params.g1 > 0:
            upper = (a2d - params.m_d) / params.g1
            flags["immune_within_band"] = 0.0 < point.I < upper and params.k < 1.0
            values["immune_band_upper"] = upper
        else:
            flags["immune_within_band"] = False
            values["immune_band_upper"] = math.inf
        flags["single_positive_root"] = c < 0
        flags["no_realistic_roots"] = b > 0 and c > 0
        results.append(
            Equilibrium(
                point=point,
                family="coexisting",
                residual=residual_norm(point, params),
                existence_flags=flags,
                flag_values=values,
                provenance="newton_refined",
            )
        )
    return results


def _check(params: ModelParams) -> None:
    violations = validate_params(params)
    if violations:
        raise DomainError("invalid parameters: " + "; ".join(violations))


def find_all(params: ModelParams) -> list[Equilibrium]:
    """Union of the four family finders, deduplicated across families and
    sorted by family order then tumor load."""
    catalog: list[Equilibrium] = []
    for finder in (tumor_free, dead_type1, dead_type2, coexisting):
        catalog.extend(finder(params))
    kept: list[Equilibrium] = []
    for eq in catalog:
        arr = eq.point.as_array()
        scale = 1.0 + float(np.max(np.abs(arr)))
        duplicate = any(
            float(np.max(np.abs(arr - other.point.as_array()))) / scale <= DEDUP_TOL
            for other in kept
        )
        if not duplicate:
            kept.append(eq)
    kept.sort(key=lambda eq: (FAMILIES.index(eq.family), eq.point.T))
    return kept


def catalog_to_json(catalog: list[Equilibrium]) -> str:
    """Equilibrium catalog as a JSON array."""
    payload = [
        {
            "family": eq.family,
            "point": {"N": eq.point.N, "T": eq.point.T, "I": eq.point.I,
                      "E": eq.point.E, "M": eq.point.M},
            "residual": eq.residual,
            "confirmed": eq.confirmed,
            "flags": dict(eq.existence_flags),
            "flag_values": {k: _json_num(v) for k, v in eq.flag_values.items()},
            "provenance": eq.provenance,
        }
        for eq in catalog
    ]
    return json.dumps(payload, indent=2) + "\n"


def _json_num(v: float):
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def catalog_to_csv(catalog: list[Equilibrium]) -> str:
    """Equilibrium catalog as CSV: one row per equilibrium."""
    lines = ["family,N,T,I,E,M,residual,confirmed,provenance"]
    for eq in catalog:
        nums = ",".join(f"{v:.17g}" for v in (*eq.point.as_tuple(), eq.residual))
        lines.append(f"{eq.family},{nums},{str(eq.confirmed).lower()},{eq.provenance}")
    return "\n".join(lines) + "\n"
