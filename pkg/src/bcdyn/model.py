"""Core model: parameters, state, vector field, analytic Jacobian and the
named coefficient families used by the stability analysis.

The model couples five compartments: normal cells N, tumor cells T, immune
cells I, estrogen E and an immunotherapy drug M.

    dN/dt = N(a1 - b1 N) - d1 T N / (1 + epsilon T) - l1 N E (1-k)
    dT/dt = T(a2 d - b2 T) - g1 I T - m_d T + l1 N E (1-k)
    dI/dt = s + r I T/(o+T) - g2 I T - m I - l3 I E (1-k)/(g+E)
            + p_M I M/(j_M+M)
    dE/dt = p(1-k) - theta E
    dM/dt = v_M - n_M M + chi M I/(xi+I)

Treatment knobs: d (ketogenic diet factor on tumor growth), k (endocrine
therapy efficacy, scales every (1-k) term) and v_M (immunotherapy infusion).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

__all__ = [
    "DomainError",
    "PARAM_NAMES",
    "STATE_NAMES",
    "DENOM_GUARD",
    "ModelParams",
    "SystemState",
    "CoefficientSet",
    "ReproductionNumbers",
    "validate_params",
    "make_rhs",
    "rhs",
    "jacobian",
    "coefficients",
    "reproduction_numbers",
]


class DomainError(ValueError):
    """An evaluation left the admissible domain (singular denominator,
    non-finite input, invalid parameters)."""


#: Any Michaelis-Menten style denominator below this magnitude is treated
#: as singular rather than evaluated.
DENOM_GUARD = 1e-12

PARAM_NAMES = (
    "a1", "b1", "d1", "epsilon", "l1", "k",
    "a2", "d", "b2", "g1", "m_d",
    "s", "r", "o", "g2", "m", "l3", "g", "p_M", "j_M",
    "p", "theta",
    "v_M", "n_M", "chi", "xi",
)

STATE_NAMES = ("N", "T", "I", "E", "M")

# Rates that may legitimately vanish (switching off a coupling or a source
# is a meaningful scenario: no diet interaction, no endocrine feed, no
# infusion, ...).  Everything else must be strictly positive.
_NONNEGATIVE_OK = frozenset(
    {"d1", "epsilon", "l1", "g1", "s", "r", "g2", "l3", "p_M", "p", "v_M", "chi"}
)


@dataclass(frozen=True)
class ModelParams:
    """The 26 rate and threshold constants of the model.

    Units are abstract: "cells", "concentration" and "per day"; no unit
    conversion is performed anywhere.
    """

    a1: float      # normal-cell logistic growth, per day
    b1: float      # normal-cell logistic death, per day*cell
    d1: float      # tumor-induced inhibition of normal cells, per day*cell
    epsilon: float # saturation coefficient of the inhibition, per cell
    l1: float      # estrogen-driven transformation rate, per day*conc
    k: float       # endocrine-therapy efficacy, dimensionless in [0, 1]
    a2: float      # tumor logistic growth, per day
    d: float       # ketogenic-diet dose factor, dimensionless > 0
    b2: float      # tumor logistic death, per day*cell
    g1: float      # immune kill rate of tumor, per day*cell
    m_d: float     # tumor starvation death rate, per day
    s: float       # immune source rate, cells/day
    r: float       # immune response rate, per day
    o: float       # immune threshold, cells
    g2: float      # immune inactivation by tumor, per day*cell
    m: float       # immune natural death, per day
    l3: float      # estrogen suppression of immunity, per day
    g: float       # estrogen threshold, concentration
    p_M: float     # immunotherapy activation rate of immune cells, per day
    j_M: float     # immunotherapy half-saturation, concentration
    p: float       # estrogen source rate, conc/day
    theta: float   # estrogen washout rate, per day
    v_M: float     # immunotherapy infusion rate, drug/day
    n_M: float     # drug turnover rate, per day
    chi: float     # drug production from activated immune cells, per day
    xi: float      # immune half-saturation for drug production, cells

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def replace(self, **changes: float) -> "ModelParams":
        values = self.as_dict()
        values.update(changes)
        return ModelParams(**values)

    @classmethod
    def from_dict(cls, values: dict[str, float]) -> "ModelParams":
        missing = [name for name in PARAM_NAMES if name not in values]
        unknown = [name for name in values if name not in PARAM_NAMES]
        if missing or unknown:
            raise DomainError(
                f"bad parameter set: missing={missing} unknown={unknown}"
            )
        return cls(**{name: float(values[name]) for name in PARAM_NAMES})


@dataclass(frozen=True)
class SystemState:
    """One point of the five-compartment phase space."""

    N: float
    T: float
    I: float
    E: float
    M: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.N, self.T, self.I, self.E, self.M)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    @classmethod
    def from_sequence(cls, values) -> "SystemState":
        vals = tuple(float(v) for v in values)
        if len(vals) != 5:
            raise DomainError(f"state needs 5 components, got {len(vals)}")
        return cls(*vals)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.as_tuple())


def validate_params(params: ModelParams) -> list[str]:
    """Report every violated parameter constraint; an empty list means valid."""
    violations: list[str] = []
    for field in fields(params):
        value = getattr(params, field.name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            violations.append(f"{field.name} must be finite, got {value!r}")
            continue
        if field.name == "k":
            if not 0.0 <= value <= 1.0:
                violations.append("k outside [0,1]")
        elif field.name in _NONNEGATIVE_OK:
            if value < 0.0:
                violations.append(f"{field.name} must be nonnegative")
        else:
            if value <= 0.0:
                violations.append(f"{field.name} must be positive")
    return violations


def _require_valid(params: ModelParams) -> None:
    violations = validate_params(params)
    if violations:
        raise DomainError("invalid parameters: " + "; ".join(violations))


def make_rhs(params: ModelParams):
    """Bind ``params`` into a scalar derivative function.

    Returns ``f(N, T, I, E, M) -> (dN, dT, dI, dE, dM)`` operating on plain
    floats.  This is the single source of truth for the vector field; both
    :func:`rhs` and the integrator delegate to it.
    """
    _require_valid(params)
    a1, b1, d1, epsilon, l1 = params.a1, params.b1, params.d1, params.epsilon, params.l1
    a2, d, b2, g1, m_d = params.a2, params.d, params.b2, params.g1, params.m_d
    s, r, o, g2, m = params.s, params.r, params.o, params.g2, params.m
    l3, g, p_M, j_M = params.l3, params.g, params.p_M, params.j_M
    p, theta, v_M, n_M = params.p, params.theta, params.v_M, params.n_M
    chi, xi = params.chi, params.xi
    omk = 1.0 - params.k

    def f(N: float, T: float, I: float, E: float, M: float):
        den_sat = 1.0 + epsilon * T
        den_o = o + T
        den_g = g + E
        den_j = j_M + M
        den_xi = xi + I
        if abs(den_sat) < DENOM_GUARD:
            raise DomainError("singular denominator 1 + epsilon*T in the N equation")
        if abs(den_o) < DENOM_GUARD:
            raise DomainError("singular denominator o + T in the I equation")
        if abs(den_g) < DENOM_GUARD:
            raise DomainError("singular denominator g + E in the I equation")
        if abs(den_j) < DENOM_GUARD:
            raise DomainError("singular denominator j_M + M in the I equation")
        if abs(den_xi) < DENOM_GUARD:
            raise DomainError("singular denominator xi + I in the M equation")
        transform = l1 * N * E * omk
        dN = N * (a1 - b1 * N) - d1 * T * N / den_sat - transform
        dT = T * (a2 * d - b2 * T) - g1 * I * T - m_d * T + transform
        dI = (
            s
            + r * I * T / den_o
            - g2 * I * T
            - m * I
            - l3 * I * E * omk / den_g
            + p_M * I * M / den_j
        )
        dE = p * omk - theta * E
        dM = v_M - n_M * M + chi * M * I / den_xi
        return dN, dT, dI, dE, dM

    return f


def rhs(state: SystemState, params: ModelParams) -> tuple[float, float, float, float, float]:
    """Evaluate the vector field at ``state``."""
    if not state.is_finite():
        raise DomainError(f"non-finite state {state}")
    return make_rhs(params)(*state.as_tuple())


def residual_norm(state: SystemState, params: ModelParams) -> float:
    """Infinity norm of the vector field; zero at an exact equilibrium."""
    return max(abs(v) for v in rhs(state, params))


def _denominators(state: SystemState, params: ModelParams) -> dict[str, float]:
    dens = {
        "1 + epsilon*T": 1.0 + params.epsilon * state.T,
        "o + T": params.o + state.T,
        "g + E": params.g + state.E,
        "j_M + M": params.j_M + state.M,
        "xi + I": params.xi + state.I,
    }
    for name, value in dens.items():
        if abs(value) < DENOM_GUARD:
            raise DomainError(f"singular denominator {name}")
    return dens


def jacobian(state: SystemState, params: ModelParams) -> np.ndarray:
    """Analytic 5x5 Jacobian of :func:`rhs`, entry (i, j) = d(rhs_i)/d(state_j).

    Derived from the vector field itself, term by term; the E row is
    (0, 0, 0, -theta, 0) because the estrogen equation is linear and
    decoupled.
    """
    if not state.is_finite():
        raise DomainError(f"non-finite state {state}")
    _require_valid(params)
    N, T, I, E, M = state.as_tuple()
    dens = _denominators(state, params)
    den_sat = dens["1 + epsilon*T"]
    den_o = dens["o + T"]
    den_g = dens["g + E"]
    den_j = dens["j_M + M"]
    den_xi = dens["xi + I"]
    pm = params
    omk = 1.0 - pm.k

    J = np.zeros((5, 5))
    # N row
    J[0, 0] = pm.a1 - 2.0 * pm.b1 * N - pm.d1 * T / den_sat - pm.l1 * E * omk
    J[0, 1] = -pm.d1 * N / den_sat**2
    J[0, 3] = -pm.l1 * N * omk
    # T row
    J[1, 0] = pm.l1 * E * omk
    J[1, 1] = pm.a2 * pm.d - 2.0 * pm.b2 * T - pm.g1 * I - pm.m_d
    J[1, 2] = -pm.g1 * T
    J[1, 3] = pm.l1 * N * omk
    # I row
    J[2, 1] = pm.r * I * pm.o / den_o**2 - pm.g2 * I
    J[2, 2] = (
        pm.r * T / den_o
        - pm.g2 * T
        - pm.m
        - pm.l3 * E * omk / den_g
        + pm.p_M * M / den_j
    )
    J[2, 3] = -pm.l3 * I * pm.g * omk / den_g**2
    J[2, 4] = pm.p_M * I * pm.j_M / den_j**2
    # E row: linear, decoupled
    J[3, 3] = -pm.theta
    # M row
    J[4, 2] = pm.chi * M * pm.xi / den_xi**2
    J[4, 4] = -pm.n_M + pm.chi * I / den_xi
    return J


_COEFF_LENGTHS = {"A": 11, "B": 9, "C": 10}


@dataclass(frozen=True)
class CoefficientSet:
    """One of the named coefficient families (A0..A10, B0..B8 or C0..C9)
    evaluated at a state.

    The A family is meant for tumor-free states (T = 0), B for states with
    N = T = 0 and C for states with N = 0; evaluating elsewhere is allowed
    but flagged through ``family_warning``.
    """

    tag: str
    values: tuple[float, ...]
    evaluated_at: SystemState
    family_warning: str | None = None

    def __post_init__(self) -> None:
        if self.tag not in _COEFF_LENGTHS:
            raise DomainError(f"unknown coefficient tag {self.tag!r}")
        if len(self.values) != _COEFF_LENGTHS[self.tag]:
            raise DomainError(
                f"tag {self.tag} needs {_COEFF_LENGTHS[self.tag]} values, "
                f"got {len(self.values)}"
            )

    def __getitem__(self, index: int) -> float:
        return self.values[index]


def coefficients(state: SystemState, params: ModelParams, tag: str) -> CoefficientSet:
    """Evaluate the A, B or C coefficient family at ``state``.

    The formulas are kept exactly as defined for the respective equilibrium
    family analyses (including the non-squared g+E denominator of A8 and the
    missing (1-k) factor in C0); cross-checks against the derived Jacobian
    live in the stability layer.
    """
    if not state.is_finite():
        raise DomainError(f"non-finite state {state}")
    _require_valid(params)
    if tag not in _COEFF_LENGTHS:
        raise DomainError(f"unknown coefficient tag {tag!r}")
    N, T, I, E, M = state.as_tuple()
    dens = _denominators(state, params)
    den_sat = dens["1 + epsilon*T"]
    den_o = dens["o + T"]
    den_g = dens["g + E"]
    den_j = dens["j_M + M"]
    den_xi = dens["xi + I"]
    if abs(params.o) < DENOM_GUARD:
        raise DomainError("singular denominator o in A4/B3")
    pm = params
    omk = 1.0 - pm.k

    # Shared building blocks between the three families.
    estro_suppression = pm.l3 * E * omk / den_g
    drug_activation = pm.p_M * M / den_j
    drug_feedback = pm.chi * M * pm.xi / den_xi**2
    immuno_gain = pm.p_M * I * pm.j_M / den_j**2
    drug_decay = -pm.n_M + pm.chi * I / den_xi

    warning = None
    if tag == "A":
        if abs(T) > 1e-9:
            warning = "A coefficients evaluated away from a tumor-free state (T != 0)"
        values = (
            pm.a1 - 2.0 * pm.b1 * N - pm.l1 * E * omk,         # A0
            pm.l1 * E * omk,                                    # A1
            pm.d1 * N,                                          # A2
            pm.a2 * pm.d - pm.g1 * I - pm.m_d,                  # A3
            pm.r * I / pm.o - pm.g2 * I,                        # A4
            -pm.m - estro_suppression + drug_activation,        # A5
            drug_feedback,                                      # A6
            pm.l1 * N * omk,                                    # A7
            pm.l3 * I * pm.g * omk / den_g,                     # A8
            immuno_gain,                                        # A9
            drug_decay,                                         # A10
        )
    elif tag == "B":
        if abs(T) > 1e-9 or abs(N) > 1e-9:
            warning = "B coefficients evaluated away from a dead type-1 state (N = T = 0)"
        values = (
            pm.a1 - pm.l1 * E * omk,                            # B0
            pm.l1 * E * omk,                                    # B1
            pm.a2 * pm.d - pm.g1 * I - pm.m_d,                  # B2
            pm.r * I / pm.o - pm.g2 * I,                        # B3
            -pm.m - estro_suppression + drug_activation,        # B4
            drug_feedback,                                      # B5
            -pm.l3 * I * pm.g * omk / den_g**2,                 # B6
            immuno_gain,                                        # B7
            drug_decay,                                         # B8
        )
    else:
        if abs(N) > 1e-9:
            warning = "C coefficients evaluated away from a dead type-2 state (N != 0)"
        values = (
            pm.a1 - pm.d1 * T / den_sat - pm.l1 * E,            # C0
            pm.l1 * E * omk,                                    # C1
            pm.a2 * pm.d - 2.0 * pm.b2 * T - pm.g1 * I - pm.m_d,  # C2
            pm.r * I * pm.o / den_o**2 - pm.g2 * I,             # C3
            pm.g1 * T,                                          # C4
            pm.r * T / den_o - pm.g2 * T - pm.m
            - estro_suppression + drug_activation,              # C5
            drug_feedback,                                      # C6
            -pm.l3 * I * pm.g * omk / den_g**2,                 # C7
            immuno_gain,                                        # C8
            drug_decay,                                         # C9
        )
    return CoefficientSet(tag=tag, values=values, evaluated_at=state, family_warning=warning)


@dataclass(frozen=True)
class ReproductionNumbers:
    """Treatment reproduction numbers.

    ``r0 = A6*A9 / (A10*A5)`` and ``r1 = A1*A2 / (A0*A3)`` evaluated from the
    A family; ``r_im = B5*B7 / (B4*B8)`` from the B family, defined only at
    states with N = T = 0.  A number whose denominator magnitude falls below
    1e-12 is flagged undefined (value NaN); no exact division by zero is
    ever performed.
    """

    r0: float
    r1: float
    r_im: float
    r0_defined: bool
    r1_defined: bool
    r_im_defined: bool


def _safe_ratio(num: float, den: float) -> tuple[float, bool]:
    if abs(den) < DENOM_GUARD:
        return (math.nan, False)
    return (num / den + 0.0, True)  # + 0.0 normalizes -0.0


def reproduction_numbers(eq_point: SystemState, params: ModelParams) -> ReproductionNumbers:
    """Evaluate R0, R1 (and R_IM at dead type-1 states) at an equilibrium."""
    A = coefficients(eq_point, params, "A")
    r0, r0_ok = _safe_ratio(A[6] * A[9], A[10] * A[5])
    r1, r1_ok = _safe_ratio(A[1] * A[2], A[0] * A[3])
    r_im, r_im_ok = math.nan, False
    if abs(eq_point.N) < 1e-9 and abs(eq_point.T) < 1e-9:
        B = coefficients(eq_point, params, "B")
        r_im, r_im_ok = _safe_ratio(B[5] * B[7], B[4] * B[8])
    return ReproductionNumbers(
        r0=r0, r1=r1, r_im=r_im,
        r0_defined=r0_ok, r1_defined=r1_ok, r_im_defined=r_im_ok,
    )
