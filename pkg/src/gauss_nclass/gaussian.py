"""Covariance-matrix model for two-mode Gaussian states.

Conventions used throughout the package:

* quadratures obey ``[x, p] = i`` so the vacuum has variance 1/2 in every
  quadrature;
* the phase-space ordering is ``(x_a, p_a, x_b, p_b)``;
* only second moments are tracked (displacements never matter here).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

VACUUM_VARIANCE = 0.5
SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-10
STANDARD_FORM_TOL = 1e-9
DET_TOL = 1e-12

OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))

# indices of the six entries surviving in standard form
_STANDARD_SLOTS = {(0, 0), (1, 1), (2, 2), (3, 3), (0, 2), (2, 0), (1, 3), (3, 1)}


class StateError(ValueError):
    """Base class for malformed or inadmissible states."""


class AsymmetricMatrixError(StateError):
    pass


class UnphysicalStateError(StateError):
    """Raised when a state violates the uncertainty relation."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NonStandardFormError(StateError):
    pass


def symplectic_eigenvalues(sigma) -> np.ndarray:
    """Return ``(nu_1, nu_2)``, ascending, as the moduli of the eigenvalues of ``i Omega sigma``."""
    sigma = np.asarray(sigma, dtype=float)
    ev = np.sort(np.abs(np.linalg.eigvals(1j * OMEGA @ sigma)))
    # eigenvalues come in +/- pairs
    return np.array([ev[0], ev[2]])


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric 4x4 second-moment matrix.

    Construction checks shape and symmetry only. Physicality is reported by
    :func:`validate` and enforced by the operations that need it, so that an
    unphysical matrix can still be loaded and diagnosed.
    """

    sigma: np.ndarray

    def __post_init__(self):
        sigma = np.array(self.sigma, dtype=float)
        if sigma.shape != (4, 4):
            raise StateError(f"covariance matrix must be 4x4, got shape {sigma.shape}")
        if not np.all(np.isfinite(sigma)):
            raise StateError("covariance matrix has non-finite entries")
        asym = float(np.max(np.abs(sigma - sigma.T)))
        if asym > SYMMETRY_TOL:
            raise AsymmetricMatrixError(
                f"covariance matrix is not symmetric: max |sigma - sigma^T| = {asym:.3e}"
            )
        sigma = 0.5 * (sigma + sigma.T)
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)

    def __eq__(self, other):
        if not isinstance(other, CovarianceMatrix):
            return NotImplemented
        return bool(np.array_equal(self.sigma, other.sigma))

    __hash__ = None

    def to_json(self) -> dict:
        return {"sigma": self.sigma.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "CovarianceMatrix":
        return cls(np.asarray(data["sigma"], dtype=float))


@dataclass(frozen=True)
class ValidationReport:
    symmetric: bool
    physical: bool
    positive_definite: bool
    symplectic_eigenvalues: tuple

    def to_json(self) -> dict:
        return {
            "symmetric": self.symmetric,
            "physical": self.physical,
            "positive_definite": self.positive_definite,
            "symplectic_eigenvalues": list(self.symplectic_eigenvalues),
        }


def validate(state: CovarianceMatrix) -> ValidationReport:
    sigma = state.sigma
    nu = symplectic_eigenvalues(sigma)
    pos_def = bool(np.linalg.eigvalsh(sigma).min() > 0)
    physical = pos_def and bool(nu.min() >= VACUUM_VARIANCE - PHYSICAL_TOL)
    return ValidationReport(
        symmetric=True,
        physical=physical,
        positive_definite=pos_def,
        symplectic_eigenvalues=(float(nu[0]), float(nu[1])),
    )


def require_physical(state: CovarianceMatrix) -> ValidationReport:
    report = validate(state)
    if not report.physical:
        raise UnphysicalStateError(
            "state violates the uncertainty relation: symplectic eigenvalues "
            f"{report.symplectic_eigenvalues}",
            report,
        )
    return report


@dataclass(frozen=True)
class StandardMoments:
    """The six moments of a standard-form state.

    ``m1 = <x_a^2>``, ``m2 = <p_a^2>``, ``n1 = <x_b^2>``, ``n2 = <p_b^2>``,
    ``c1 = <x_a x_b>``, ``c2 = <p_a p_b>``; every other entry is zero.
    """

    m1: float
    m2: float
    n1: float
    n2: float
    c1: float
    c2: float

    def __post_init__(self):
        for name in ("m1", "m2", "n1", "n2", "c1", "c2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise StateError(f"moment {name} is not finite")
            object.__setattr__(self, name, value)
        if min(self.m1, self.m2, self.n1, self.n2) <= 0:
            raise StateError("local variances must be positive")
        quarter = VACUUM_VARIANCE**2
        if self.m1 * self.m2 < quarter - PHYSICAL_TOL or self.n1 * self.n2 < quarter - PHYSICAL_TOL:
            raise UnphysicalStateError("moments violate the local uncertainty relation")
        require_physical(self.to_matrix())

    def as_tuple(self) -> tuple:
        return (self.m1, self.m2, self.n1, self.n2, self.c1, self.c2)

    def to_matrix(self) -> CovarianceMatrix:
        return CovarianceMatrix(
            np.array(
                [
                    [self.m1, 0.0, self.c1, 0.0],
                    [0.0, self.m2, 0.0, self.c2],
                    [self.c1, 0.0, self.n1, 0.0],
                    [0.0, self.c2, 0.0, self.n2],
                ]
            )
        )

    def to_json(self) -> dict:
        return {"m1": self.m1, "m2": self.m2, "n1": self.n1, "n2": self.n2, "c1": self.c1, "c2": self.c2}

    @classmethod
    def from_json(cls, data: dict) -> "StandardMoments":
        return cls(*(data[k] for k in ("m1", "m2", "n1", "n2", "c1", "c2")))


def standard_form_defect(state: CovarianceMatrix) -> tuple:
    """Largest entry outside the standard-form slots, and its index."""
    worst, where = 0.0, None
    for i in range(4):
        for j in range(i + 1, 4):
            if (i, j) in _STANDARD_SLOTS:
                continue
            if abs(state.sigma[i, j]) > worst:
                worst, where = abs(state.sigma[i, j]), (i, j)
    return worst, where


def is_standard_form(state: CovarianceMatrix, tol: float = STANDARD_FORM_TOL) -> bool:
    return standard_form_defect(state)[0] < tol


def to_standard_moments(state: CovarianceMatrix) -> StandardMoments:
    worst, where = standard_form_defect(state)
    if worst >= STANDARD_FORM_TOL:
        raise NonStandardFormError(
            f"matrix is not in standard form: |sigma{where}| = {worst:.3e}"
        )
    s = state.sigma
    return StandardMoments(s[0, 0], s[1, 1], s[2, 2], s[3, 3], s[0, 2], s[1, 3])


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class LocalSymplectic:
    """A local Gaussian unitary, one 2x2 symplectic block per mode."""

    s_a: np.ndarray
    s_b: np.ndarray

    def __post_init__(self):
        for name in ("s_a", "s_b"):
            block = np.array(getattr(self, name), dtype=float)
            if block.shape != (2, 2):
                raise ValueError(f"{name} must be 2x2")
            det = np.linalg.det(block)
            # rounding in det grows with the entries of heavily squeezed blocks
            if abs(det - 1.0) > DET_TOL * max(1.0, float(np.sum(block**2))):
                raise ValueError(f"{name} is not symplectic: det = {det!r}")
            block.setflags(write=False)
            object.__setattr__(self, name, block)

    __hash__ = None

    def __eq__(self, other):
        if not isinstance(other, LocalSymplectic):
            return NotImplemented
        return bool(np.array_equal(self.s_a, other.s_a) and np.array_equal(self.s_b, other.s_b))

    @property
    def matrix(self) -> np.ndarray:
        out = np.zeros((4, 4))
        out[:2, :2] = self.s_a
        out[2:, 2:] = self.s_b
        return out

    def compose(self, first: "LocalSymplectic") -> "LocalSymplectic":
        """``self o first``: apply ``first``, then ``self``."""
        return LocalSymplectic(self.s_a @ first.s_a, self.s_b @ first.s_b)

    __matmul__ = compose

    @classmethod
    def identity(cls) -> "LocalSymplectic":
        return cls(np.eye(2), np.eye(2))

    @classmethod
    def squeeze(cls, s_a: float = 1.0, s_b: float = 1.0) -> "LocalSymplectic":
        """``x_k -> sqrt(s_k) x_k``, ``p_k -> p_k / sqrt(s_k)``."""
        ra, rb = math.sqrt(s_a), math.sqrt(s_b)
        return cls(np.diag([ra, 1.0 / ra]), np.diag([rb, 1.0 / rb]))

    @classmethod
    def rotation(cls, theta_a: float = 0.0, theta_b: float = 0.0) -> "LocalSymplectic":
        return cls(_rotation(theta_a), _rotation(theta_b))

    def to_json(self) -> dict:
        return {"s_a": self.s_a.tolist(), "s_b": self.s_b.tolist()}


def apply_local(state: CovarianceMatrix, t: LocalSymplectic) -> CovarianceMatrix:
    S = t.matrix
    out = S @ state.sigma @ S.T
    return CovarianceMatrix(0.5 * (out + out.T))


# --- named states -----------------------------------------------------------

def vacuum() -> CovarianceMatrix:
    return CovarianceMatrix(VACUUM_VARIANCE * np.eye(4))


def thermal(n_a: float = 0.0, n_b: float = 0.0) -> CovarianceMatrix:
    """Product of thermal states with mean occupations ``n_a`` and ``n_b``."""
    va, vb = n_a + 0.5, n_b + 0.5
    return CovarianceMatrix(np.diag([va, va, vb, vb]))


def two_mode_squeezer(r: float) -> np.ndarray:
    ch, sh = math.cosh(r), math.sinh(r)
    z = np.diag([1.0, -1.0])
    return np.block([[ch * np.eye(2), sh * z], [sh * z, ch * np.eye(2)]])


def beam_splitter(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.block([[c * np.eye(2), s * np.eye(2)], [-s * np.eye(2), c * np.eye(2)]])


def squeezed_thermal(r: float, n_a: float = 0.0, n_b: float = 0.0) -> CovarianceMatrix:
    S = two_mode_squeezer(r)
    return CovarianceMatrix(S @ thermal(n_a, n_b).sigma @ S.T)


def tmsv(r: float) -> CovarianceMatrix:
    """Two-mode squeezed vacuum; exact standard-form entries."""
    m = math.cosh(2 * r) / 2
    c = math.sinh(2 * r) / 2
    return StandardMoments(m, m, m, m, c, -c).to_matrix()


# --- sampling ---------------------------------------------------------------

@dataclass(frozen=True)
class SamplerConfig:
    """Recipe for seeded random two-mode states.

    Each state is a two-mode squeezed thermal state. With ``mix_passive`` a
    random beam splitter and phase shift follow, which breaks the
    ``c1 = -c2`` symmetry; random local rotations are always applied last.
    """

    seed: int
    count: int
    max_squeeze: float = 1.0
    max_thermal: float = 1.0
    mix_passive: bool = True

    def __post_init__(self):
        if int(self.count) < 1:
            raise ValueError("count must be >= 1")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not math.isfinite(self.max_squeeze) or self.max_squeeze < 0:
            raise ValueError("max_squeeze must be finite and non-negative")
        if not math.isfinite(self.max_thermal) or self.max_thermal < 0:
            raise ValueError("max_thermal must be finite and non-negative")


def sample_state(config: SamplerConfig, index: int) -> CovarianceMatrix:
    if not 0 <= index < config.count:
        raise IndexError(f"index {index} outside [0, {config.count})")
    rng = np.random.default_rng([int(config.seed), int(index)])
    # fixed draw order so mix_passive does not shift the stream
    r, n_a, n_b, bs_angle, bs_phase, rot_a, rot_b = rng.uniform(0.0, 1.0, 7)
    r *= config.max_squeeze
    n_a *= config.max_thermal
    n_b *= config.max_thermal
    sigma = squeezed_thermal(r, n_a, n_b).sigma
    if config.mix_passive:
        P = LocalSymplectic.rotation(2 * math.pi * bs_phase, 0.0).matrix
        B = beam_splitter(0.5 * math.pi * bs_angle)
        sigma = B @ P @ sigma @ P.T @ B.T
    L = LocalSymplectic.rotation(2 * math.pi * rot_a, 2 * math.pi * rot_b).matrix
    sigma = L @ sigma @ L.T
    return CovarianceMatrix(0.5 * (sigma + sigma.T))


# --- JSON I/O ---------------------------------------------------------------

def load_state(path) -> CovarianceMatrix:
    """Read either ``{"sigma": ...}`` or a standard-moments object."""
    data = json.loads(Path(path).read_text())
    if "sigma" in data:
        return CovarianceMatrix.from_json(data)
    keys = ("m1", "m2", "n1", "n2", "c1", "c2")
    if all(k in data for k in keys):
        s = np.zeros((4, 4))
        s[0, 0], s[1, 1], s[2, 2], s[3, 3] = (float(data[k]) for k in keys[:4])
        s[0, 2] = s[2, 0] = float(data["c1"])
        s[1, 3] = s[3, 1] = float(data["c2"])
        return CovarianceMatrix(s)
    raise StateError("state JSON needs a 'sigma' matrix or the six standard moments")


def dump_state(state: CovarianceMatrix, path) -> None:
    Path(path).write_text(json.dumps(state.to_json()) + "\n")
