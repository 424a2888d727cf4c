"""Two-qubit fidelity kernel.

Pure states are length-4 complex vectors and mixed states 4x4 density
matrices, both in the computational basis |00>, |01>, |10>, |11>. Matrix
square roots go through a cyclic Jacobi eigensolver so the Uhlmann fidelity
does not depend on a general-purpose ``sqrtm``.
"""

from __future__ import annotations

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
JACOBI_TOL = 1e-13
# eigenvalues this close to zero (relative to the largest) are rounding noise
EIG_FLOOR = 64 * np.finfo(float).eps
MAX_SWEEPS = 100


class StateError(ValueError):
    """Raised when a vector or matrix is not a valid quantum state."""


def as_pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (4,):
        raise StateError(f"pure state must have 4 amplitudes, got shape {psi.shape}")
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > NORM_TOL:
        raise StateError(f"pure state is not normalized (norm^2 = {norm!r})")
    return psi


def as_density_matrix(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise StateError(f"density matrix must be 4x4, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise StateError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > NORM_TOL:
        raise StateError(f"density matrix has trace {tr!r}, expected 1")
    if eigendecompose_hermitian(rho)[0].min() < -PSD_TOL:
        raise StateError("density matrix is not positive semidefinite")
    return rho


def bell_state() -> np.ndarray:
    """The Bell state (|00> + |11>)/sqrt(2)."""
    s = 1.0 / np.sqrt(2.0)
    return np.array([s, 0.0, 0.0, s], dtype=complex)


def projector(psi) -> np.ndarray:
    psi = as_pure_state(psi)
    return np.outer(psi, psi.conj())


def werner_state(w: float) -> np.ndarray:
    """``w |B00><B00| + (1 - w) I/4``."""
    if not 0.0 <= w <= 1.0:
        raise StateError(f"Werner weight must lie in [0, 1], got {w}")
    return w * projector(bell_state()) + (1.0 - w) * np.eye(4, dtype=complex) / 4.0


def eigendecompose_hermitian(m, tol: float = JACOBI_TOL):
    """Eigenvalues and eigenvectors of a Hermitian matrix by cyclic Jacobi.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies a real Givens rotation that zeroes it. Sweeps stop once the
    Frobenius norm of the off-diagonal part drops below ``tol`` (scaled by the
    matrix norm when that exceeds 1).

    Returns ``(w, V)`` with ascending real ``w`` and unitary ``V`` such that
    ``m = V diag(w) V^H``.
    """
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.linalg.norm(a)))
    if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    limit = tol * scale

    for _ in range(MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < limit:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < np.finfo(float).tiny:
                    a[p, q] = a[q, p] = 0.0
                    continue
                conj_phase = np.conj(apq) / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # rephase column q so the pivot is real, then rotate by (c, s)
                g = np.array([[c, s], [-s * conj_phase, c * conj_phase]])
                a[:, [p, q]] = a[:, [p, q]] @ g
                a[[p, q], :] = g.conj().T @ a[[p, q], :]
                a[p, q] = a[q, p] = 0.0
                v[:, [p, q]] = v[:, [p, q]] @ g

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _psd_eigenvalues(w):
    if w.min() < -PSD_TOL:
        raise StateError(f"matrix has eigenvalue {w.min()!r} below -{PSD_TOL}")
    floor = EIG_FLOOR * max(1.0, float(np.abs(w).max()))
    return np.where(w > floor, w, 0.0)


def psd_sqrt(m) -> np.ndarray:
    """Square root of a positive semidefinite Hermitian matrix."""
    w, v = eigendecompose_hermitian(m)
    root = np.sqrt(_psd_eigenvalues(w))
    return (v * root) @ v.conj().T


def fidelity_pure(a, b) -> float:
    """``|<a|b>|^2``."""
    a, b = as_pure_state(a), as_pure_state(b)
    return float(abs(np.vdot(a, b)) ** 2)


def fidelity_pure_mixed(psi, sigma) -> float:
    """``<psi| sigma |psi>``."""
    psi, sigma = as_pure_state(psi), as_density_matrix(sigma)
    return float(np.vdot(psi, sigma @ psi).real)


def entanglement_fidelity(sigma) -> float:
    """Overlap of ``sigma`` with the Bell state (|00> + |11>)/sqrt(2)."""
    return fidelity_pure_mixed(bell_state(), sigma)


def fidelity_mixed(rho, sigma) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2``."""
    rho, sigma = as_density_matrix(rho), as_density_matrix(sigma)
    root = psd_sqrt(sigma)
    inner = root @ rho @ root
    inner = 0.5 * (inner + inner.conj().T)
    w, _ = eigendecompose_hermitian(inner)
    return float(np.sum(np.sqrt(_psd_eigenvalues(w))) ** 2)
