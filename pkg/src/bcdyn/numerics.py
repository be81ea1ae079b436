"""Self-contained numerics for small dense problems.

Everything here is sized for the 5-compartment model: polynomials of degree
at most 8, 5x5 matrices, nonlinear systems in at most 5 unknowns.  All
functions are pure and deterministic.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "NumericsError",
    "RootFindingError",
    "NewtonError",
    "Polynomial",
    "RootSet",
    "HurwitzVerdict",
    "poly_roots",
    "char_poly",
    "eigenvalues",
    "routh_hurwitz",
    "newton_solve",
    "MARGINAL_RE",
    "MARGINAL_MINOR",
]

#: Real parts within this band of zero give no stability verdict.
MARGINAL_RE = 1e-9
#: Hurwitz minors within this band of zero give no stability verdict.
MARGINAL_MINOR = 1e-12

MAX_DEGREE = 8


class NumericsError(RuntimeError):
    pass


class RootFindingError(NumericsError):
    """Root iteration did not converge; carries the best iterate found."""

    def __init__(self, message: str, roots, residuals, iterations: int):
        super().__init__(message)
        self.roots = tuple(roots)
        self.residuals = tuple(residuals)
        self.iterations = iterations


class NewtonError(NumericsError):
    """Newton iteration failed; carries the last iterate and its residual."""

    def __init__(self, message: str, last_iterate, residual: float):
        super().__init__(message)
        self.last_iterate = np.asarray(last_iterate, dtype=float)
        self.residual = residual


@dataclass(frozen=True)
class Polynomial:
    """Real-coefficient polynomial, coefficients in descending degree."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) == 0:
            raise NumericsError("empty coefficient sequence")
        if len(self.coeffs) - 1 > MAX_DEGREE:
            raise NumericsError(f"degree {len(self.coeffs) - 1} exceeds {MAX_DEGREE}")
        if self.coeffs[0] == 0.0:
            raise NumericsError("leading coefficient must be nonzero")
        if not all(math.isfinite(c) for c in self.coeffs):
            raise NumericsError("non-finite coefficient")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def norm(self) -> float:
        """Max-abs coefficient norm."""
        return max(abs(c) for c in self.coeffs)

    def __call__(self, z):
        acc = 0.0 + 0.0j if isinstance(z, complex) else 0.0
        for c in self.coeffs:
            acc = acc * z + c
        return acc

    def derivative(self) -> "Polynomial":
        n = self.degree
        if n == 0:
            raise NumericsError("derivative of a constant is the zero polynomial")
        return Polynomial(tuple(c * (n - i) for i, c in enumerate(self.coeffs[:-1])))


@dataclass(frozen=True)
class RootSet:
    """All complex roots of a polynomial, with per-root residuals |p(root)|."""

    roots: tuple[complex, ...]
    residuals: tuple[float, ...]
    iterations: int

    @property
    def max_real(self) -> float:
        return max(z.real for z in self.roots)


def _sorted_roots(roots: Sequence[complex]) -> list[complex]:
    return sorted(roots, key=lambda z: (round(z.real, 12), round(z.imag, 12)))


def poly_roots(p: Polynomial, tol: float = 1e-12, max_iter: int = 200) -> RootSet:
    """All complex roots of ``p`` by Aberth-Ehrlich simultaneous iteration.

    Exact zero roots (trailing zero coefficients) are deflated first.  The
    remaining roots start on a deterministic circle inside the Cauchy bound
    and are iterated until every root satisfies
    ``|p(z)| <= tol * ||p|| * max(1, |z|)**n``.
    """
    if p.degree < 1:
        raise NumericsError("degree must be at least 1")

    coeffs = list(p.coeffs)
    zero_roots = 0
    while coeffs[-1] == 0.0 and len(coeffs) > 1:
        coeffs.pop()
        zero_roots += 1

    n = len(coeffs) - 1
    norm = p.norm
    if n == 0:
        roots = [0.0 + 0.0j] * zero_roots
        return RootSet(
            roots=tuple(_sorted_roots(roots)),
            residuals=tuple(abs(p(z)) for z in _sorted_roots(roots)),
            iterations=0,
        )

    q = Polynomial(tuple(coeffs))
    dq = q.derivative()

    if n == 1:
        z = [complex(-coeffs[1] / coeffs[0])]
    else:
        # Cauchy upper bound on root magnitudes; deterministic angular offset
        # keeps the initial guesses off the real axis.
        radius = 1.0 + max(abs(c / coeffs[0]) for c in coeffs[1:])
        z = [
            radius * cmath.exp(2j * math.pi * (j + 0.35) / n)
            for j in range(n)
        ]

    def scaled_residual(zj: complex) -> float:
        return abs(q(zj)) / (norm * max(1.0, abs(zj)) ** n)

    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        offsets = []
        for j in range(n):
            pv = q(z[j])
            if pv == 0:
                offsets.append(0.0 + 0.0j)
                continue
            dv = dq(z[j])
            if dv == 0:
                # Nudge off a stationary point deterministically.
                z[j] += 1e-8 * (1.0 + abs(z[j]))
                dv = dq(z[j])
                pv = q(z[j])
            w = pv / dv
            ssum = 0.0 + 0.0j
            for i in range(n):
                if i != j:
                    diff = z[j] - z[i]
                    if diff == 0:
                        diff = 1e-14 * (1.0 + abs(z[j]))
                    ssum += 1.0 / diff
            denom = 1.0 - w * ssum
            offsets.append(w if abs(denom) < 1e-30 else w / denom)
        max_step = 0.0
        for j in range(n):
            z[j] -= offsets[j]
            max_step = max(max_step, abs(offsets[j]) / (1.0 + abs(z[j])))
        if max_step < 1e-15 or all(scaled_residual(zj) < tol for zj in z):
            converged = all(scaled_residual(zj) < tol for zj in z)
            break

    roots = _sorted_roots(list(z) + [0.0 + 0.0j] * zero_roots)
    residuals = tuple(abs(p(zj)) for zj in roots)
    if not converged:
        raise RootFindingError(
            f"root iteration did not converge in {iterations} iterations",
            roots, residuals, iterations,
        )
    return RootSet(roots=tuple(roots), residuals=residuals, iterations=iterations)


def char_poly(matrix: np.ndarray) -> Polynomial:
    """Characteristic polynomial det(lambda*I - M) by the Faddeev-LeVerrier
    recurrence; monic, degree equal to the matrix dimension."""
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NumericsError(f"need a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericsError("non-finite matrix entry")
    n = A.shape[0]
    coeffs = [1.0]
    Mk = np.zeros_like(A)
    identity = np.eye(n)
    for kk in range(1, n + 1):
        Mk = A @ (Mk + coeffs[-1] * identity) if kk > 1 else A.copy()
        ck = -np.trace(Mk) / kk
        coeffs.append(float(ck))
    return Polynomial(tuple(coeffs))


def eigenvalues(matrix: np.ndarray, tol: float = 1e-12, max_iter: int = 200) -> RootSet:
    """Eigenvalues of a small dense matrix as the roots of its
    characteristic polynomial."""
    return poly_roots(char_poly(matrix), tol=tol, max_iter=max_iter)


@dataclass(frozen=True)
class HurwitzVerdict:
    """Routh-Hurwitz classification of a real polynomial.

    ``stable`` iff (with the leading coefficient normalized positive) all
    coefficients and all principal minors of the Hurwitz matrix are strictly
    positive; any minor within 1e-12 of zero yields ``inconclusive``.
    """

    minors: tuple[float, ...]
    all_positive: bool
    verdict: str


def routh_hurwitz(p: Polynomial, marginal: float = MARGINAL_MINOR) -> HurwitzVerdict:
    """Classify root locations of ``p`` (degree 1..5) via Hurwitz minors."""
    n = p.degree
    if not 1 <= n <= 5:
        raise NumericsError(f"routh_hurwitz supports degree 1..5, got {n}")
    a = list(p.coeffs)
    if a[0] < 0:
        a = [-c for c in a]

    def coeff(idx: int) -> float:
        return a[idx] if 0 <= idx <= n else 0.0

    H = np.array([[coeff(2 * i - j + 1) for j in range(n)] for i in range(n)])
    minors = tuple(float(np.linalg.det(H[: kk + 1, : kk + 1])) for kk in range(n))
    all_positive = all(mi > 0.0 for mi in minors)
    if any(abs(mi) < marginal for mi in minors):
        verdict = "inconclusive"
    elif all_positive and all(c > 0.0 for c in a):
        verdict = "stable"
    else:
        verdict = "unstable"
    return HurwitzVerdict(minors=minors, all_positive=all_positive, verdict=verdict)


def newton_solve(
    F: Callable[[np.ndarray], np.ndarray],
    J: Callable[[np.ndarray], np.ndarray],
    x0,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> np.ndarray:
    """Damped Newton iteration for a small nonlinear system.

    Full steps with halving line search (damping factor down to 2**-20)
    until ``||F(x)||_inf < tol``.  Deterministic for fixed inputs.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    fx = np.atleast_1d(np.asarray(F(x), dtype=float))
    norm = float(np.max(np.abs(fx)))
    for _ in range(max_iter):
        if norm < tol:
            return x
        Jx = np.atleast_2d(np.asarray(J(x), dtype=float))
        try:
            step = np.linalg.solve(Jx, -fx)
        except np.linalg.LinAlgError as exc:
            raise NewtonError(f"singular Jacobian: {exc}", x, norm) from exc
        if not np.all(np.isfinite(step)):
            raise NewtonError("non-finite Newton step", x, norm)
        lam = 1.0
        while True:
            xn = x + lam * step
            fn = np.atleast_1d(np.asarray(F(xn), dtype=float))
            nn = float(np.max(np.abs(fn))) if np.all(np.isfinite(fn)) else math.inf
            if nn < norm or nn < tol:
                break
            lam *= 0.5
            if lam < 2.0**-20:
                raise NewtonError("line search failed to reduce the residual", x, norm)
        x, fx, norm = xn, fn, nn
    if norm < tol:
        return x
    raise NewtonError(f"no convergence in {max_iter} iterations", x, norm)
