"""Dense real linear-algebra kernels for desk-scale problems.

Matrices are plain ``float64`` numpy arrays. The kernels here are the only
place where factorizations happen; everything downstream (Gramian series,
factor series, the exact oracle) goes through them.
"""

import warnings

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import (
    NotPositiveDefinite,
    NotSymmetric,
    RankDeficient,
    ShapeMismatch,
    SingularInput,
    UnstableOrIllConditioned,
)
from .tolerances import DEFAULT

__all__ = [
    "as_matrix",
    "symmetrize",
    "is_symmetric",
    "solve_linear",
    "cholesky",
    "svd_full",
    "LyapunovSolver",
    "solve_lyapunov",
    "lyapunov_residual",
]


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D float array (scalars become 1x1)."""
    M = np.array(M, dtype=float)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise ShapeMismatch(f"{name} must be two-dimensional, got shape {M.shape}")
    if M.size == 0:
        raise ShapeMismatch(f"{name} is empty")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def symmetrize(M):
    return 0.5 * (M + M.T)


def is_symmetric(M, tol=DEFAULT.symmetry):
    scale = np.linalg.norm(M)
    return np.linalg.norm(M - M.T) <= tol * max(scale, np.finfo(float).tiny)


def _require_symmetric(M, tol, name):
    if M.shape[0] != M.shape[1]:
        raise ShapeMismatch(f"{name} must be square, got {M.shape}")
    if not is_symmetric(M, tol):
        rel = np.linalg.norm(M - M.T) / np.linalg.norm(M)
        raise NotSymmetric(f"{name} is not symmetric (relative asymmetry {rel:.2e})")
    return symmetrize(M)


def solve_linear(M, rhs, cond_max=DEFAULT.cond_max):
    """Solve ``M Z = rhs`` for square or tall ``M``.

    Square systems are solved directly; tall systems in the least-squares
    sense. ``rhs`` may be a vector or a matrix, and the result has the
    matching shape.

    Raises
    ------
    RankDeficient
        If the estimated 2-norm condition number of ``M`` exceeds
        ``cond_max``.
    """
    M = as_matrix(M, "M")
    rhs = np.asarray(rhs, dtype=float)
    vector = rhs.ndim == 1
    rhs2 = rhs.reshape(-1, 1) if vector else rhs
    n_rows, n_cols = M.shape
    if n_rows < n_cols:
        raise ShapeMismatch(f"M must be square or tall, got {M.shape}")
    if rhs2.shape[0] != n_rows:
        raise ShapeMismatch(f"rhs has {rhs2.shape[0]} rows, M has {n_rows}")
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > cond_max:
        raise RankDeficient(f"condition estimate {cond:.3e} exceeds {cond_max:.1e}")
    if n_rows == n_cols:
        Z = np.linalg.solve(M, rhs2)
    else:
        Z = np.linalg.lstsq(M, rhs2, rcond=None)[0]
    return Z.ravel() if vector else Z


def cholesky(W, sym_tol=DEFAULT.symmetry):
    """Lower-triangular ``L`` with ``L @ L.T == W``.

    ``W`` is symmetrized before factoring. A non-positive pivot usually
    means the system upstream is unstable or not minimal.
    """
    W = _require_symmetric(as_matrix(W, "W"), sym_tol, "W")
    try:
        L = np.linalg.cholesky(W)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"Cholesky failed: {exc}") from None
    if np.any(np.diag(L) <= 0):
        raise NotPositiveDefinite("Cholesky factor has a non-positive pivot")
    return L


def _jacobi_columns(G, tol, max_sweeps):
    # One-sided (Hestenes) Jacobi: orthogonalize the columns of G in place,
    # accumulating the right rotations in V.
    n = G.shape[1]
    V = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                gp = G[:, p]
                gq = G[:, q]
                alpha = gp @ gp
                beta = gq @ gq
                gamma = gp @ gq
                if abs(gamma) <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                G[:, [p, q]] = np.column_stack((c * gp - s * gq, s * gp + c * gq))
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, [p, q]] = np.column_stack((c * vp - s * vq, s * vp + c * vq))
        if not rotated:
            return V
    raise SingularInput(f"Jacobi SVD did not converge in {max_sweeps} sweeps")


def svd_full(R, tol=DEFAULT.jacobi_tol, max_sweeps=DEFAULT.jacobi_max_sweeps,
             floor=DEFAULT.svd_floor):
    """Full SVD ``R = U diag(sigma) V^T`` of a square nonsingular matrix.

    Computed by one-sided Jacobi. Singular values come back in descending
    order. Signs are fixed so that in every column of ``U`` the entry of
    largest magnitude (lowest index on ties) is positive; the matching
    column of ``V`` is flipped along with it.

    Returns
    -------
    U, sigma, V : ndarray
        Note that ``V`` is returned, not ``V^T``.

    Raises
    ------
    SingularInput
        If some singular value is below ``floor * sigma_max``.
    """
    R = as_matrix(R, "R")
    n, n2 = R.shape
    if n != n2:
        raise ShapeMismatch(f"R must be square, got {R.shape}")
    G = R.copy()
    V = _jacobi_columns(G, tol, max_sweeps)
    sigma = np.linalg.norm(G, axis=0)
    smax = sigma.max()
    if smax == 0.0 or sigma.min() <= floor * smax:
        raise SingularInput(
            f"singular value {sigma.min():.3e} below floor {floor:.1e} x sigma_max")
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    U = G[:, order] / sigma
    V = V[:, order]
    for j in range(n):
        k = np.argmax(np.abs(U[:, j]))
        if U[k, j] < 0:
            U[:, j] = -U[:, j]
            V[:, j] = -V[:, j]
    return U, sigma, V


def lyapunov_residual(A, W, Q):
    """Scaled Frobenius residual of ``A W + W A^T + Q = 0``."""
    res = np.linalg.norm(A @ W + W @ A.T + Q)
    scale = np.linalg.norm(A) * np.linalg.norm(W) + np.linalg.norm(Q)
    return res / scale if scale > 0 else res


class LyapunovSolver:
    """Solver for ``A W + W A^T + Q = 0`` with ``A`` fixed.

    The equation is vectorized into ``(A (x) I + I (x) A) vec(W) = -vec(Q)``
    and the n^2 x n^2 operator is LU-factored once, so repeated solves with
    different right-hand sides (as in the Gramian recursion) are cheap.

    Raises
    ------
    UnstableOrIllConditioned
        At construction if the operator is numerically singular, which
        happens when two eigenvalues of ``A`` sum to zero (e.g. an undamped
        mode); at :meth:`solve` if the residual test fails.
    """

    def __init__(self, A, tol=DEFAULT):
        A = as_matrix(A, "A")
        if A.shape[0] != A.shape[1]:
            raise ShapeMismatch(f"A must be square, got {A.shape}")
        self.A = A
        self.n = A.shape[0]
        self.tol = tol
        eye = np.eye(self.n)
        K = np.kron(A, eye) + np.kron(eye, A)
        with warnings.catch_warnings():
            # singularity is detected below through the condition estimate
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            self._lu = sla.lu_factor(K, check_finite=False)
        anorm = np.linalg.norm(K, 1)
        rcond, info = lapack.dgecon(self._lu[0], anorm, norm="1")
        if info != 0 or not rcond > 1.0 / tol.lyapunov_cond_max:
            raise UnstableOrIllConditioned(
                f"Lyapunov operator is singular (rcond {rcond:.2e}); "
                "A has eigenvalues summing to zero")

    def solve(self, Q):
        Q = _require_symmetric(as_matrix(Q, "Q"), self.tol.symmetry, "Q")
        if Q.shape != self.A.shape:
            raise ShapeMismatch(f"Q has shape {Q.shape}, A has {self.A.shape}")
        w = sla.lu_solve(self._lu, -Q.ravel(), check_finite=False)
        W = symmetrize(w.reshape(self.n, self.n))
        res = lyapunov_residual(self.A, W, Q)
        if not res <= self.tol.lyapunov_residual:
            raise UnstableOrIllConditioned(f"Lyapunov residual {res:.2e} too large")
        return W


def solve_lyapunov(A, Q, tol=DEFAULT):
    """Solve ``A W + W A^T + Q = 0`` for symmetric ``W``.

    For the observability form ``A^T W + W A + Q = 0`` pass ``A.T``.
    """
    return LyapunovSolver(A, tol).solve(Q)
