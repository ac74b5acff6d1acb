"""Local-unitary canonical form in which P-positivity is equivalent to separability.

The reduction runs in two stages:

1. :func:`reduce_to_standard_form` zeroes every moment except
   ``(m1, m2, n1, n2, c1, c2)`` using local symplectic diagonalization and
   rotations, then orders ``c1 >= c2``.
2. :func:`solve_squeezings` looks for local squeezings ``s_a, s_b`` such that

   * ``(m1' - 1/2)(n2' - 1/2) = (n1' - 1/2)(m2' - 1/2)``, and
   * ``sqrt((m1' - 1/2)(n1' - 1/2)) - sqrt((m2' - 1/2)(n2' - 1/2)) = |c1'| - |c2'|``.

Once both hold, the Gaussian P function is positive exactly when the state
is separable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq, minimize

from .gaussian import (
    PHYSICAL_TOL,
    VACUUM_VARIANCE,
    CovarianceMatrix,
    LocalSymplectic,
    StandardMoments,
    apply_local,
    is_standard_form,
    require_physical,
    to_standard_moments,
)
from .measures import gaussian_p_positive

RESIDUAL_TOL = 1e-9
MAX_ITER = 200
DAMPING = 0.5
DEGENERATE_TOL = 1e-12
ROOT_MERGE_TOL = 1e-6
S_BOUNDS = (1e-6, 1e6)

_QUARTER_TURN = np.array([[0.0, -1.0], [1.0, 0.0]])


class CanonicalizationError(RuntimeError):
    """Base class for solver failures; carries the last residuals."""

    def __init__(self, message, residuals=(math.nan, math.nan)):
        super().__init__(message)
        self.residuals = residuals


class LocallyNonclassicalError(CanonicalizationError):
    pass


class ConvergenceError(CanonicalizationError):
    pass


class AmbiguousRootError(CanonicalizationError):
    pass


@dataclass(frozen=True)
class CanonicalResult:
    moments: StandardMoments
    transform: LocalSymplectic
    residual_11: float
    residual_14: float
    converged: bool
    iterations: int = 0
    method: str = "identity"
    squeezings: tuple = (1.0, 1.0)
    roots: tuple = field(default_factory=tuple)

    @property
    def p_positive(self) -> bool:
        return gaussian_p_positive(self.moments)

    def to_json(self) -> dict:
        return {
            "moments": self.moments.to_json(),
            "transform": self.transform.to_json(),
            "squeezings": {"s_a": self.squeezings[0], "s_b": self.squeezings[1]},
            "residual_11": self.residual_11,
            "residual_14": self.residual_14,
            "converged": self.converged,
            "iterations": self.iterations,
            "method": self.method,
            "roots": [list(r) for r in self.roots],
        }


# --- standard form ----------------------------------------------------------

def _inv_sqrt_sym(block: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(block)
    return (v / np.sqrt(w)) @ v.T


def _local_normalizer(block: np.ndarray) -> np.ndarray:
    """Symplectic S with ``S A S^T = sqrt(det A) * I``."""
    return np.linalg.det(block) ** 0.25 * _inv_sqrt_sym(block)


def _super_vacuum(state: CovarianceMatrix) -> bool:
    return bool(np.diag(state.sigma).min() >= VACUUM_VARIANCE - PHYSICAL_TOL)


def reduce_to_standard_form(state: CovarianceMatrix) -> tuple:
    """Return ``(moments, transform)`` with ``transform`` mapping ``state`` to standard form.

    A state already in standard form with no sub-vacuum quadrature is left
    alone (apart from the ``c1 >= c2`` ordering).
    """
    require_physical(state)
    if is_standard_form(state) and _super_vacuum(state):
        transform = LocalSymplectic.identity()
    else:
        sigma = state.sigma
        s_a = _local_normalizer(sigma[:2, :2])
        s_b = _local_normalizer(sigma[2:, 2:])
        cross = s_a @ sigma[:2, 2:] @ s_b.T
        u, d, vt = np.linalg.svd(cross)
        # keep both rotations proper so they stay symplectic
        if np.linalg.det(u) < 0:
            u[:, 1] *= -1.0
        if np.linalg.det(vt) < 0:
            vt[1, :] *= -1.0
        transform = LocalSymplectic(u.T @ s_a, vt @ s_b)
    moments = to_standard_moments(apply_local(state, transform))
    if moments.c1 < moments.c2:
        transform = LocalSymplectic(_QUARTER_TURN, _QUARTER_TURN) @ transform
        moments = to_standard_moments(apply_local(state, transform))
    return moments, transform


# --- squeezing conditions ---------------------------------------------------

def squeeze_moments(moments: StandardMoments, s_a: float, s_b: float) -> StandardMoments:
    m = moments
    root = math.sqrt(s_a * s_b)
    return StandardMoments(s_a * m.m1, m.m2 / s_a, s_b * m.n1, m.n2 / s_b, root * m.c1, m.c2 / root)


def condition_residuals(moments: StandardMoments) -> tuple:
    """Residuals of the two canonical-form conditions on already-squeezed moments."""
    m = moments
    f, g = m.m1 - VACUUM_VARIANCE, m.m2 - VACUUM_VARIANCE
    h, k = m.n1 - VACUUM_VARIANCE, m.n2 - VACUUM_VARIANCE
    r11 = f * k - h * g
    r14 = math.sqrt(max(f * h, 0.0)) - math.sqrt(max(g * k, 0.0)) - (abs(m.c1) - abs(m.c2))
    return r11, r14


class _System:
    """Both conditions as functions of ``(u, v) = (ln s_a, ln s_b)``."""

    def __init__(self, m: StandardMoments):
        self.m1, self.m2, self.n1, self.n2 = m.m1, m.m2, m.n1, m.n2
        self.c1, self.c2 = abs(m.c1), abs(m.c2)
        half = VACUUM_VARIANCE
        # f, g, h, k >= 0 confines u and v to these intervals
        self.u_range = (-math.log(2 * self.m1), math.log(2 * self.m2))
        self.v_range = (-math.log(2 * self.n1), math.log(2 * self.n2))
        self.half = half

    def parts(self, u, v):
        sa, sb = math.exp(u), math.exp(v)
        f = sa * self.m1 - self.half
        g = self.m2 / sa - self.half
        h = sb * self.n1 - self.half
        k = self.n2 / sb - self.half
        return f, g, h, k, math.exp(0.5 * (u + v))

    def in_domain(self, u, v):
        f, g, h, k, _ = self.parts(u, v)
        return min(f, g, h, k) >= 0.0

    def residual(self, u, v):
        f, g, h, k, root = self.parts(u, v)
        r11 = f * k - h * g
        r14 = math.sqrt(max(f * h, 0.0)) - math.sqrt(max(g * k, 0.0)) - (self.c1 * root - self.c2 / root)
        return r11, r14

    def jacobian(self, u, v):
        f, g, h, k, root = self.parts(u, v)
        half = self.half
        fh = max(math.sqrt(max(f * h, 0.0)), 1e-150)
        gk = max(math.sqrt(max(g * k, 0.0)), 1e-150)
        corr = 0.5 * (self.c1 * root + self.c2 / root)
        a11 = (f + half) * k + h * (g + half)
        a12 = -f * (k + half) - (h + half) * g
        a21 = (f + half) * h / (2 * fh) + (g + half) * k / (2 * gk) - corr
        a22 = f * (h + half) / (2 * fh) + g * (k + half) / (2 * gk) - corr
        return a11, a12, a21, a22

    def curve_v(self, u):
        """``v`` on the first-condition curve through a given ``u``."""
        f, g, _, _, _ = self.parts(u, 0.0)
        f, g = max(f, 0.0), max(g, 0.0)
        n1, n2 = self.n1, self.n2
        if g == 0.0:
            return math.log(2 * n2)
        q = f / g
        b = 0.5 * (q - 1.0)
        disc = math.sqrt(b * b + 4.0 * q * n1 * n2)
        # root of n1 s^2 + b s - q n2 = 0, written without cancellation
        sb = (disc - b) / (2 * n1) if b <= 0 else 2 * q * n2 / (b + disc)
        return math.log(sb)


def _newton(system: _System, u: float, v: float, max_iter: int = MAX_ITER):
    """Damped Newton; returns ``(u, v, iterations, residual_norm)``."""
    if not system.in_domain(u, v):
        return u, v, 0, math.inf
    r = system.residual(u, v)
    norm = math.hypot(*r)
    it = 0
    for it in range(1, max_iter + 1):
        if norm == 0.0:
            break
        a11, a12, a21, a22 = system.jacobian(u, v)
        det = a11 * a22 - a12 * a21
        if det == 0.0 or not math.isfinite(det):
            break
        du = -(a22 * r[0] - a12 * r[1]) / det
        dv = -(-a21 * r[0] + a11 * r[1]) / det
        lam = 1.0
        while lam > 1e-12:
            tu, tv = u + lam * du, v + lam * dv
            if system.in_domain(tu, tv):
                tr = system.residual(tu, tv)
                tnorm = math.hypot(*tr)
                if tnorm < norm:
                    break
            lam *= DAMPING
        else:
            break  # stalled: no descent step left
        u, v, r, norm = tu, tv, tr, tnorm
    return u, v, it, norm


def _bisect_on_curve(system: _System):
    """Solve the second condition along the curve where the first holds exactly."""

    def along(u):
        return system.residual(u, system.curve_v(u))[1]

    lo, hi = system.u_range
    span = hi - lo
    lo, hi = lo + 1e-12 * span, hi - 1e-12 * span
    f_lo, f_hi = along(lo), along(hi)
    if f_lo == 0.0:
        return lo, system.curve_v(lo)
    if f_hi == 0.0:
        return hi, system.curve_v(hi)
    if f_lo * f_hi > 0:
        raise ConvergenceError(
            "second condition does not change sign along the first-condition curve",
            (0.0, min(abs(f_lo), abs(f_hi))),
        )
    u = brentq(along, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return u, system.curve_v(u)


def _result(moments, u, v, iterations, method, roots=()):
    s_a, s_b = math.exp(u), math.exp(v)
    lo, hi = S_BOUNDS
    if not (lo <= s_a <= hi and lo <= s_b <= hi):
        raise ConvergenceError(f"squeezing outside [{lo:g}, {hi:g}]: s_a={s_a:.3e}, s_b={s_b:.3e}")
    primed = squeeze_moments(moments, s_a, s_b)
    r11, r14 = condition_residuals(primed)
    return CanonicalResult(
        moments=primed,
        transform=LocalSymplectic.squeeze(s_a, s_b),
        residual_11=r11,
        residual_14=r14,
        converged=max(abs(r11), abs(r14)) < RESIDUAL_TOL,
        iterations=iterations,
        method=method,
        squeezings=(s_a, s_b),
        roots=tuple(roots),
    )


def solve_squeezings(moments: StandardMoments, check_uniqueness: bool = True) -> CanonicalResult:
    """Find local squeezings satisfying both canonical conditions.

    Newton iteration in ``(ln s_a, ln s_b)`` starts from the identity. If it
    stalls, the first condition is solved in closed form and the second is
    bracketed along that curve. With ``check_uniqueness`` four further starts
    spread over the admissible box are tried; distinct roots are reported and
    must agree on the P-positivity verdict.
    """
    m = moments
    if min(m.m1, m.m2, m.n1, m.n2) < VACUUM_VARIANCE - PHYSICAL_TOL:
        raise LocallyNonclassicalError(
            f"sub-vacuum local variance {min(m.m1, m.m2, m.n1, m.n2):.6g}; reduce to standard form first"
        )
    r0 = condition_residuals(m)
    brackets = [x - VACUUM_VARIANCE for x in (m.m1, m.m2, m.n1, m.n2)]
    if max(abs(r) for r in r0) <= DEGENERATE_TOL or max(brackets) <= DEGENERATE_TOL:
        return _result(m, 0.0, 0.0, 0, "identity", roots=[(1.0, 1.0)])

    system = _System(m)
    u, v, iterations, norm = _newton(system, 0.0, 0.0)
    method = "newton"
    if not norm < RESIDUAL_TOL * 1e-2:
        u, v = _bisect_on_curve(system)
        method = "bisection"
    result = _result(m, u, v, iterations, method)
    if not result.converged:
        raise ConvergenceError(
            "squeezing solver did not reach the residual tolerance",
            (result.residual_11, result.residual_14),
        )

    roots = [(u, v)]
    if check_uniqueness:
        (ulo, uhi), (vlo, vhi) = system.u_range, system.v_range
        for fu in (0.25, 0.75):
            for fv in (0.25, 0.75):
                gu, gv, _, gnorm = _newton(system, ulo + fu * (uhi - ulo), vlo + fv * (vhi - vlo))
                if gnorm < RESIDUAL_TOL * 1e-2 and all(
                    math.hypot(gu - ru, gv - rv) > ROOT_MERGE_TOL for ru, rv in roots
                ):
                    roots.append((gu, gv))
        verdict = result.p_positive
        for ru, rv in roots[1:]:
            if gaussian_p_positive(squeeze_moments(m, math.exp(ru), math.exp(rv))) != verdict:
                raise AmbiguousRootError(
                    "distinct roots disagree on P-positivity",
                    (result.residual_11, result.residual_14),
                )
    return replace(result, roots=tuple((math.exp(a), math.exp(b)) for a, b in roots))


def canonicalize(state: CovarianceMatrix, check_uniqueness: bool = True) -> CanonicalResult:
    moments, reduction = reduce_to_standard_form(state)
    solved = solve_squeezings(moments, check_uniqueness=check_uniqueness)
    return replace(solved, transform=solved.transform @ reduction)


def minimal_depth(moments: StandardMoments, starts=((0.0, 0.0), (0.5, -0.5), (-0.5, 0.5))) -> tuple:
    """Nonclassicality depth minimized over local squeezings; returns ``(T, s_a, s_b)``.

    Diagnostic only. The canonical conditions above do not in general pick
    the depth-minimizing squeezing, so this can be smaller than the depth of
    :func:`canonicalize`'s output.
    """
    m = moments

    def depth_at(x):
        sa, sb = math.exp(x[0]), math.exp(x[1])
        root = math.sqrt(sa * sb)
        worst = 0.0
        for a, b, c in ((sa * m.m1, sb * m.n1, root * m.c1), (m.m2 / sa, m.n2 / sb, m.c2 / root)):
            worst = max(worst, 0.5 * (1.0 - a - b + math.sqrt(4.0 * c * c + (a - b) ** 2)))
        return worst

    best = None
    for x0 in starts:
        res = minimize(depth_at, x0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
        if best is None or res.fun < best.fun:
            best = res
    return float(best.fun), math.exp(best.x[0]), math.exp(best.x[1])
