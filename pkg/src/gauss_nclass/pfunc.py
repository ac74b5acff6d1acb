"""P function of the separable mixture ``p |beta><beta| (x) |1><1| + (1-p) |-beta><-beta| (x) |0><0|``.

Every pure component carries one extra unit of vacuum noise, which makes the
P function regular. Per mode the building blocks are

* noisy coherent state: ``(2/pi) exp(-2|a - beta|^2)``
* noisy single photon: ``(2/pi) (4|a|^2 - 1) exp(-2|a|^2)``

so the joint function carries the prefactor ``(2/pi)^2 = 4/pi^2``.

The state is a convex mixture of product states and therefore separable,
although its joint P function takes negative values.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEMO_BETA = 2.0
DEMO_P = 0.25
HIGH_P = 0.75


@dataclass(frozen=True)
class MixtureParams:
    beta: complex
    p: float

    def __post_init__(self):
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "p", float(self.p))
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.p > marginal_b_positivity_threshold():
            warnings.warn(
                f"p = {self.p} > 1/2: the mode-b marginal is negative near the origin",
                stacklevel=2,
            )


@dataclass(frozen=True)
class GridSpec:
    center: complex = 0j
    half_width: float = 4.0
    points_per_axis: int = 161

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if int(self.points_per_axis) < 2:
            raise ValueError("points_per_axis must be >= 2")

    def axis(self) -> np.ndarray:
        """Real offsets of the cut line; the imaginary part stays at ``center.imag``."""
        return self.center.real + np.linspace(-self.half_width, self.half_width, int(self.points_per_axis))


@dataclass(frozen=True)
class FieldSlice:
    x_label: str
    y_label: str
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray  # values[i, j] at (x[i], y[j])

    @property
    def min_value(self) -> float:
        return float(self.values.min())

    @property
    def argmin(self) -> tuple:
        i, j = np.unravel_index(int(np.argmin(self.values)), self.values.shape)
        return float(self.x[i]), float(self.y[j])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([self.x_label, self.y_label, "P"])
            for i, xv in enumerate(self.x):
                for j, yv in enumerate(self.y):
                    writer.writerow([f"{xv:.9g}", f"{yv:.9g}", f"{self.values[i, j]:.9g}"])

    def summary(self, grid_a: GridSpec | None = None, grid_b: GridSpec | None = None) -> dict:
        out = {"min": self.min_value, "argmin": list(self.argmin)}
        grids = {}
        for key, g in (("a", grid_a), ("b", grid_b)):
            if g is not None:
                grids[key] = {
                    "center": [g.center.real, g.center.imag],
                    "half_width": g.half_width,
                    "points_per_axis": int(g.points_per_axis),
                }
        out["grid"] = grids
        return out

    def write_summary(self, path, grid_a=None, grid_b=None) -> None:
        Path(path).write_text(json.dumps(self.summary(grid_a, grid_b), indent=2) + "\n")


def _gauss(alpha, center, width=1.0):
    """Normalized ``(2 / (pi w)) exp(-2|alpha - center|^2 / w)`` on one complex plane."""
    return 2.0 / (math.pi * width) * np.exp(-2.0 * np.abs(alpha - center) ** 2 / width)


def p_full(params: MixtureParams, alpha_a, alpha_b):
    alpha_a = np.asarray(alpha_a, dtype=complex)
    alpha_b = np.asarray(alpha_b, dtype=complex)
    vac_b = _gauss(alpha_b, 0.0)
    photon = params.p * (4.0 * np.abs(alpha_b) ** 2 - 1.0) * vac_b * _gauss(alpha_a, params.beta)
    coherent = (1.0 - params.p) * vac_b * _gauss(alpha_a, -params.beta)
    return photon + coherent


def p_marginal_a(params: MixtureParams, alpha_a):
    alpha_a = np.asarray(alpha_a, dtype=complex)
    return params.p * _gauss(alpha_a, params.beta) + (1.0 - params.p) * _gauss(alpha_a, -params.beta)


def p_marginal_b(params: MixtureParams, alpha_b):
    alpha_b = np.asarray(alpha_b, dtype=complex)
    bracket = params.p * (4.0 * np.abs(alpha_b) ** 2 - 1.0) + (1.0 - params.p)
    return bracket * _gauss(alpha_b, 0.0)


def marginal_b_positivity_threshold() -> float:
    """Largest ``p`` keeping the mode-b marginal nonnegative.

    The bracket ``p(4t - 1) + 1 - p`` with ``t = |alpha_b|^2 >= 0`` is smallest
    at ``t = 0`` where it equals ``1 - 2p``.
    """
    return 0.5


def scan_cut(params: MixtureParams, grid_a: GridSpec, grid_b: GridSpec, T: float = 0.0) -> FieldSlice:
    """Evaluate on the plane through the grid centers spanned by the real axes."""
    xa, xb = grid_a.axis(), grid_b.axis()
    aa = xa[:, None] + 1j * grid_a.center.imag
    bb = xb[None, :] + 1j * grid_b.center.imag
    values = p_full(params, aa, bb) if T == 0 else smoothed_p(params, T, aa, bb)
    return FieldSlice("alpha_ar", "alpha_br", xa, xb, np.asarray(values, dtype=float))


def smoothed_p(params: MixtureParams, T: float, alpha_a, alpha_b):
    """P function convolved with ``exp(-|alpha - gamma|^2 / T) / (pi T)`` on each plane.

    The kernel adds variance ``T`` to every quadrature, the same unit the
    Gaussian depth uses. Each Gaussian component widens by ``w = 1 + 2T``;
    the single-photon polynomial becomes ``1 - 2/w + 4|alpha_b|^2 / w^2``.
    """
    if not T > 0:
        raise ValueError("smoothing parameter T must be positive")
    alpha_a = np.asarray(alpha_a, dtype=complex)
    alpha_b = np.asarray(alpha_b, dtype=complex)
    w = 1.0 + 2.0 * T
    vac_b = _gauss(alpha_b, 0.0, w)
    poly = 1.0 - 2.0 / w + 4.0 * np.abs(alpha_b) ** 2 / w**2
    photon = params.p * poly * vac_b * _gauss(alpha_a, params.beta, w)
    coherent = (1.0 - params.p) * vac_b * _gauss(alpha_a, -params.beta, w)
    return photon + coherent


def _cut_min(params: MixtureParams, T: float, half_width: float, points: int) -> float:
    # the function depends on alpha_b only through |alpha_b|, and moving alpha_a
    # off the line through +-beta rescales both terms equally, so the line suffices
    aligned = _quiet(params)
    grid = GridSpec(0j, half_width, points)
    return scan_cut(aligned, grid, grid, T).min_value


def _quiet(params: MixtureParams) -> MixtureParams:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return MixtureParams(abs(params.beta), params.p)


def depth_of_mixture(
    params: MixtureParams, half_width: float = 6.0, points: int = 241, tol: float = 1e-4
) -> float:
    """Smallest smoothing ``T`` in ``[0, 1]`` making the P function nonnegative on the grid."""
    if _cut_min(params, 0.0, half_width, points) >= 0:
        return 0.0
    lo, hi = 0.0, 1.0
    if _cut_min(params, hi, half_width, points) < 0:
        raise ValueError("P function still negative at T = 1; bracket failed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _cut_min(params, mid, half_width, points) >= 0:
            hi = mid
        else:
            lo = mid
    return hi
