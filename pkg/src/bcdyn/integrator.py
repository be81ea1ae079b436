"""Adaptive Dormand-Prince 5(4) integration of the model with positivity
monitoring and settle detection.

Positivity handling is deliberately strict: a component dipping below the
negativity floor aborts the run instead of being projected back, so that
transcription bugs in the vector field surface as failures rather than
being silently masked.  Cosmetic negatives in [floor, 0) are clamped to
zero in the output samples only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .model import ModelParams, SystemState, STATE_NAMES, DomainError, make_rhs, validate_params

__all__ = [
    "IntegrationConfig",
    "Trajectory",
    "PositivityError",
    "StepUnderflowError",
    "integrate",
    "settle",
    "default_horizon",
    "trajectory_to_csv",
]


class PositivityError(RuntimeError):
    """A state component fell below the negativity floor."""

    def __init__(self, component: str, t: float, value: float):
        super().__init__(f"component {component} reached {value:.6e} at t = {t:.6g}")
        self.component = component
        self.t = t
        self.value = value


class StepUnderflowError(RuntimeError):
    """The adaptive step shrank below the resolvable scale."""


@dataclass(frozen=True)
class IntegrationConfig:
    t0: float
    t_end: float
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    max_step: float | None = None
    initial_step: float | None = None
    negativity_floor: float = -1e-9

    def __post_init__(self) -> None:
        if not self.t_end > self.t0:
            raise DomainError(f"t_end must exceed t0, got [{self.t0}, {self.t_end}]")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.negativity_floor > 0:
            raise DomainError("negativity_floor must be <= 0")
        if self.max_step is not None and self.max_step <= 0:
            raise DomainError("max_step must be positive")
        if self.initial_step is not None and self.initial_step <= 0:
            raise DomainError("initial_step must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Equidistant samples of an accepted integration run."""

    times: np.ndarray
    states: np.ndarray            # shape (len(times), 5)
    accepted_steps: int
    rejected_steps: int
    positivity_violations: tuple[float, float, float, float, float]

    def state_at(self, index: int) -> SystemState:
        return SystemState.from_sequence(self.states[index])

    def final_state(self) -> SystemState:
        return self.state_at(len(self.times) - 1)

    def iter_states(self) -> Iterable[SystemState]:
        for row in self.states:
            yield SystemState.from_sequence(row)


# Dormand-Prince 5(4) tableau.  The first solution row is 5th order and is
# propagated (FSAL: its last stage is the first stage of the next step);
# the E row is the difference to the embedded 4th order solution.
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0,
)

_MIN_DAMP = 0.2
_MAX_GROW = 5.0
_SAFETY = 0.9
# PI step controller exponents for an order-5 propagating pair.
_PI_ALPHA = 0.7 / 5.0
_PI_BETA = 0.4 / 5.0


def integrate(
    x0: SystemState,
    params: ModelParams,
    cfg: IntegrationConfig,
    sample_count: int = 201,
) -> Trajectory:
    """Integrate the model over [t0, t_end] with adaptive step control.

    Returns equidistant samples at ``sample_count`` times (endpoints
    included).  Deterministic: identical inputs give bit-identical output.
    """
    if sample_count < 2:
        raise DomainError("sample_count must be at least 2")
    violations = validate_params(params)
    if violations:
        raise DomainError("invalid parameters: " + "; ".join(violations))
    if isinstance(x0, SystemState):
        y = x0.as_tuple()
    else:
        y = SystemState.from_sequence(x0).as_tuple()
    if not all(math.isfinite(v) for v in y):
        raise DomainError(f"non-finite initial state {y}")
    if any(v < 0.0 for v in y):
        raise DomainError(f"initial state must be componentwise nonnegative, got {y}")

    f = make_rhs(params)
    t0, t_end = cfg.t0, cfg.t_end
    span = t_end - t0
    floor = cfg.negativity_floor
    rtol, atol = cfg.rel_tol, cfg.abs_tol
    max_step = cfg.max_step if cfg.max_step is not None else span
    h_min = 1e-14 * span

    sample_dt = span / (sample_count - 1)
    sample_times = [t0 + i * sample_dt for i in range(sample_count - 1)] + [t_end]

    def clamp(vals):
        return tuple(0.0 if floor <= v < 0.0 else v for v in vals)

    out = [clamp(y)]
    next_sample = 1

    t = t0
    k1 = f(*y)
    if not all(math.isfinite(v) for v in k1):
        raise DomainError(f"non-finite derivative at initial state {y}")

    if cfg.initial_step is not None:
        h = min(cfg.initial_step, max_step)
    else:
        fnorm = max(abs(v) for v in k1)
        ynorm = max(abs(v) for v in y)
        h = min(max_step, span / 100.0, 0.1 * (1.0 + ynorm) / (1e-10 + fnorm))

    worst = [0.0] * 5
    accepted = rejected = 0
    err_prev = 1.0

    while next_sample < len(sample_times):
        t_target = sample_times[next_sample]
        clipped = t + h >= t_target - 1e-14 * span
        h_eff = t_target - t if clipped else h
        if h_eff < h_min:
            raise StepUnderflowError(
                f"step {h_eff:.3e} underflowed at t = {t:.6g}"
            )

        y1, y2, y3, y4, y5 = y
        k11, k12, k13, k14, k15 = k1
        # stage 2
        s2 = (
            y1 + h_eff * _A21 * k11, y2 + h_eff * _A21 * k12,
            y3 + h_eff * _A21 * k13, y4 + h_eff * _A21 * k14,
            y5 + h_eff * _A21 * k15,
        )
        k2 = f(*s2)
        s3 = tuple(
            yi + h_eff * (_A31 * a + _A32 * b)
            for yi, a, b in zip(y, k1, k2)
        )
        k3 = f(*s3)
        s4 = tuple(
            yi + h_eff * (_A41 * a + _A42 * b + _A43 * c)
            for yi, a, b, c in zip(y, k1, k2, k3)
        )
        k4 = f(*s4)
        s5 = tuple(
            yi + h_eff * (_A51 * a + _A52 * b + _A53 * c + _A54 * dd)
            for yi, a, b, c, dd in zip(y, k1, k2, k3, k4)
        )
        k5 = f(*s5)
        s6 = tuple(
            yi + h_eff * (_A61 * a + _A62 * b + _A63 * c + _A64 * dd + _A65 * e)
            for yi, a, b, c, dd, e in zip(y, k1, k2, k3, k4, k5)
        )
        k6 = f(*s6)
        y_new = tuple(
            yi + h_eff * (_B1 * a + _B3 * c + _B4 * dd + _B5 * e + _B6 * ff)
            for yi, a, c, dd, e, ff in zip(y, k1, k3, k4, k5, k6)
        )
        finite = all(math.isfinite(v) for v in y_new)
        if finite:
            k7 = f(*y_new)
            finite = all(math.isfinite(v) for v in k7)
        if not finite:
            rejected += 1
            h = max(h_eff * _MIN_DAMP, h_min)
            continue

        err_sq = 0.0
        for yi, yn, a, c, dd, e, ff, gg in zip(y, y_new, k1, k3, k4, k5, k6, k7):
            ei = h_eff * (_E1 * a + _E3 * c + _E4 * dd + _E5 * e + _E6 * ff + _E7 * gg)
            sc = atol + rtol * max(abs(yi), abs(yn))
            err_sq += (ei / sc) ** 2
        err = math.sqrt(err_sq / 5.0)

        if err <= 1.0:
            accepted += 1
            t = t_target if clipped else t + h_eff
            y = y_new
            k1 = k7
            projected = False
            for i, v in enumerate(y):
                if v < worst[i]:
                    worst[i] = v
                if v < floor:
                    raise PositivityError(STATE_NAMES[i], t, v)
                if v < 0.0:
                    projected = True
            if projected:
                # Nonnegative orthant is forward invariant for the model, so
                # values in [floor, 0) are pure local error; projecting them
                # back keeps excursions from compounding across steps.
                y = tuple(max(v, 0.0) for v in y)
                k1 = f(*y)
            if clipped:
                out.append(clamp(y))
                next_sample += 1
            if err == 0.0:
                fac = _MAX_GROW
            else:
                fac = _SAFETY * err ** (-_PI_ALPHA) * err_prev ** _PI_BETA
                fac = min(_MAX_GROW, max(_MIN_DAMP, fac))
            h = min(max_step, max(h_eff * fac, h_min))
            err_prev = max(err, 1e-4)
        else:
            rejected += 1
            fac = max(_MIN_DAMP, _SAFETY * err ** (-0.2))
            h = max(h_eff * fac, h_min)

    times = np.array(sample_times)
    states = np.array(out)
    return Trajectory(
        times=times,
        states=states,
        accepted_steps=accepted,
        rejected_steps=rejected,
        positivity_violations=tuple(worst),
    )


def default_horizon(params: ModelParams) -> float:
    """Settling horizon from the slowest guaranteed linear rate."""
    slowest = min(params.theta, params.m, params.m_d)
    return min(500.0 / slowest, 1e6)


def settle(
    x0: SystemState,
    params: ModelParams,
    horizon: float,
    window: float,
    eps: float,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-11,
) -> tuple[bool, SystemState]:
    """Integrate to ``horizon`` and test whether the state stopped moving.

    Settled when every sample in the final ``window`` stays within ``eps``
    of the terminal state in the scaled infinity norm
    ``||x(t) - x(horizon)||_inf / (1 + ||x(horizon)||_inf)``.
    """
    if not horizon > window > 0:
        raise DomainError(f"need horizon > window > 0, got {horizon}, {window}")
    sample_count = int(min(5000, max(401, 20 * horizon / window))) + 1
    cfg = IntegrationConfig(t0=0.0, t_end=horizon, rel_tol=rel_tol, abs_tol=abs_tol)
    traj = integrate(x0, params, cfg, sample_count=sample_count)
    final = traj.states[-1]
    scale = 1.0 + float(np.max(np.abs(final)))
    mask = traj.times >= horizon - window
    dev = np.max(np.abs(traj.states[mask] - final), axis=1) / scale
    return bool(np.all(dev < eps)), traj.final_state()


def trajectory_to_csv(traj: Trajectory) -> str:
    """Trajectory as CSV text: header ``t,N,T,I,E,M``, 17 significant
    digits, LF line endings."""
    lines = ["t,N,T,I,E,M"]
    for t, row in zip(traj.times, traj.states):
        lines.append(",".join(f"{v:.17g}" for v in (t, *row)))
    return "\n".join(lines) + "\n"
