"""Independent reference computations used only by the tests."""

import math

import numpy as np


def symplectic_eigenvalues_invariant(sigma):
    """nu_-, nu_+ from the Delta invariant and the determinant (no eigen-solver)."""
    sigma = np.asarray(sigma)
    A, B, C = sigma[:2, :2], sigma[2:, 2:], sigma[:2, 2:]
    delta = np.linalg.det(A) + np.linalg.det(B) + 2 * np.linalg.det(C)
    det = np.linalg.det(sigma)
    disc = math.sqrt(max(delta * delta - 4 * det, 0.0))
    return math.sqrt((delta - disc) / 2), math.sqrt((delta + disc) / 2)


def p_matrix_min_eigenvalue(sigma):
    """Smallest eigenvalue of sigma - 1/2: >= 0 iff the Gaussian P function is a density."""
    return float(np.linalg.eigvalsh(np.asarray(sigma) - 0.5 * np.eye(4)).min())


def depth_by_eigenvalues(sigma):
    return max(0.0, -p_matrix_min_eigenvalue(sigma))


def ln_by_partial_transpose(sigma):
    """-log2(2 nu~_-) from the brute-force symplectic spectrum of the partial transpose."""
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    pt = flip @ np.asarray(sigma) @ flip
    omega = np.kron(np.eye(2), [[0.0, 1.0], [-1.0, 0.0]])
    nu = np.sort(np.abs(np.linalg.eigvals(1j * omega @ pt)))[0]
    return -math.log2(2 * nu)


def trapezoid_grid(half_width, step, center=0.0):
    n = int(round(2 * half_width / step)) + 1
    return center + np.linspace(-half_width, half_width, n), step


def quad4d(func, half_width=6.0, step=0.2, chunk=8):
    """Trapezoid rule over [-hw, hw]^4 of func(alpha_a, alpha_b) (complex arguments).

    The integrands are Gaussian, so the uniform rule converges spectrally.
    """
    x, h = trapezoid_grid(half_width, step)
    plane = (x[:, None] + 1j * x[None, :]).ravel()
    total = 0.0
    for start in range(0, plane.size, chunk):
        a = plane[start:start + chunk, None]
        total += float(np.sum(func(a, plane[None, :])))
    return total * h**4


def quad2d(func, half_width=6.0, step=0.1, center=0j):
    x, h = trapezoid_grid(half_width, step)
    plane = center + x[:, None] + 1j * x[None, :]
    return float(np.sum(func(plane))) * h * h
