"""Scalar criteria on standard-form moments.

All functions take :class:`StandardMoments` except :func:`simon_separable`,
which works on the full covariance matrix and serves as the independent
separability oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian import (
    PHYSICAL_TOL,
    VACUUM_VARIANCE,
    CovarianceMatrix,
    StandardMoments,
    require_physical,
    symplectic_eigenvalues,
)

P_POSITIVE_TOL = 1e-12


class DegenerateStateError(ValueError):
    """Local noise too small for the optimal Duan weight to exist."""


@dataclass(frozen=True)
class DuanResult:
    zeta: float
    lhs: float
    rhs: float

    @property
    def violation(self) -> float:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class MeasureReport:
    log_negativity_raw: float
    log_negativity: float
    depth: float
    gaussian_p_positive: bool
    duan: DuanResult
    simon_separable: bool

    def to_json(self) -> dict:
        return {
            "ln_raw": self.log_negativity_raw,
            "ln": self.log_negativity,
            "depth": self.depth,
            "p_positive": self.gaussian_p_positive,
            "duan_zeta": self.duan.zeta,
            "duan_lhs": self.duan.lhs,
            "duan_violation": self.duan.violation,
            "simon_separable": self.simon_separable,
        }


def duan_lhs(moments: StandardMoments, zeta: float) -> float:
    """``<(du)^2> + <(dv)^2>`` for ``u = |z| x_a + x_b / z``, ``v = |z| p_a - p_b / z``."""
    if zeta == 0:
        raise ValueError("zeta must be non-zero")
    m = moments
    z2 = zeta * zeta
    return z2 * (m.m1 + m.m2) + (m.n1 + m.n2) / z2 + 2.0 * math.copysign(1.0, zeta) * (m.c1 - m.c2)


def duan_rhs(zeta: float) -> float:
    return zeta * zeta + 1.0 / (zeta * zeta)


def optimal_zeta(moments: StandardMoments) -> float:
    """Weight maximizing the Duan violation ``rhs - lhs``.

    ``zeta^4 = (n1 + n2 - 1) / (m1 + m2 - 1)``. The sign is negative when
    ``c1 >= c2`` (the canonical convention) and positive otherwise.
    """
    excess_a = moments.m1 + moments.m2 - 2 * VACUUM_VARIANCE
    excess_b = moments.n1 + moments.n2 - 2 * VACUUM_VARIANCE
    if excess_a <= 0 or excess_b <= 0:
        raise DegenerateStateError(
            f"total local noise at vacuum level (m1+m2-1 = {excess_a:.3e}, n1+n2-1 = {excess_b:.3e})"
        )
    z = (excess_b / excess_a) ** 0.25
    return -z if moments.c1 >= moments.c2 else z


def duan(moments: StandardMoments, zeta: float | None = None) -> DuanResult:
    if zeta is None:
        try:
            zeta = optimal_zeta(moments)
        except DegenerateStateError:
            # a vacuum-level mode carries no correlations; the sup is approached as zeta -> inf
            zeta = -1.0 if moments.c1 >= moments.c2 else 1.0
    return DuanResult(zeta=zeta, lhs=duan_lhs(moments, zeta), rhs=duan_rhs(zeta))


def gaussian_p_positive(moments: StandardMoments, tol: float = P_POSITIVE_TOL) -> bool:
    """Whether ``sigma - 1/2`` is positive semidefinite, i.e. P is a regular density.

    In standard form this splits into an x block and a p block; equality
    counts as positive.
    """
    m = moments
    for a, b, c in ((m.m1, m.n1, m.c1), (m.m2, m.n2, m.c2)):
        da, db = a - VACUUM_VARIANCE, b - VACUUM_VARIANCE
        if da < -tol or db < -tol:
            return False
        if da * db - c * c < -tol:
            return False
    return True


def _delta_and_det(m: StandardMoments) -> tuple:
    delta = m.m1 * m.m2 + m.n1 * m.n2 - 2.0 * m.c1 * m.c2
    det = (m.m1 * m.n1 - m.c1**2) * (m.m2 * m.n2 - m.c2**2)
    return delta, det


def pt_invariant_e(moments: StandardMoments) -> float:
    """``e = Delta - sqrt(Delta^2 - 4|Sigma|)``, twice the squared smallest PT symplectic eigenvalue."""
    delta, det = _delta_and_det(moments)
    disc = delta * delta - 4.0 * det
    if disc < -1e-12 * max(1.0, delta * delta):
        raise ValueError(f"Delta^2 - 4|Sigma| = {disc:.3e} < 0; moments are not physical")
    root = math.sqrt(max(disc, 0.0))
    if det <= 0 or delta + root <= 0:
        raise ValueError("degenerate moments: e <= 0")
    # rationalized form avoids cancellation for strongly entangled states
    return 4.0 * det / (delta + root)


def log_negativity(moments: StandardMoments) -> tuple:
    """Return ``(raw, clamped)`` logarithmic negativity in bits."""
    e = pt_invariant_e(moments)
    raw = -math.log2(math.sqrt(2.0 * e)) + 0.0
    return raw, max(0.0, raw)


def block_depths(moments: StandardMoments) -> tuple:
    """Thermal noise each quadrature block needs before its P part is positive."""
    m = moments
    return tuple(
        0.5 * (1.0 - a - b + math.sqrt(4.0 * c * c + (a - b) ** 2))
        for a, b, c in ((m.m1, m.n1, m.c1), (m.m2, m.n2, m.c2))
    )


def nonclassicality_depth(moments: StandardMoments) -> float:
    """Smallest added variance ``T`` per quadrature making the P function positive.

    Both blocks must become positive, so the larger block requirement wins.
    """
    return max(0.0, *block_depths(moments))


def partial_transpose(state: CovarianceMatrix) -> np.ndarray:
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    return flip @ state.sigma @ flip


def min_pt_eigenvalue(state: CovarianceMatrix) -> float:
    return float(symplectic_eigenvalues(partial_transpose(state)).min())


def simon_separable(state: CovarianceMatrix) -> bool:
    require_physical(state)
    return min_pt_eigenvalue(state) >= VACUUM_VARIANCE - PHYSICAL_TOL


def measure_all(moments: StandardMoments) -> MeasureReport:
    raw, clamped = log_negativity(moments)
    return MeasureReport(
        log_negativity_raw=raw,
        log_negativity=clamped,
        depth=nonclassicality_depth(moments),
        gaussian_p_positive=gaussian_p_positive(moments),
        duan=duan(moments),
        simon_separable=simon_separable(moments.to_matrix()),
    )
