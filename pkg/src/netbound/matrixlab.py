"""Small dense linear algebra for network certificates.

Matrix-class tests (Z-matrix, nonsingular M-matrix), spectral quantities, and
the two weighted Lyapunov constructions used throughout:

* leaders: for the Laplacian ``L`` of a strongly connected digraph, the left
  null eigenvector ``v_o > 0`` (normalised ``v_o @ 1 == 1``) makes
  ``Q_o = V_o L + L.T V_o`` symmetric positive semidefinite with kernel
  spanned by the all-ones vector;
* followers: for a nonsingular M-matrix ``M``, the diagonal
  ``P = diag(M^-T 1) @ diag(M^-1 1)^-1`` is positive and
  ``S = P M + M.T P`` is symmetric positive definite.

Everything here operates on plain float ndarrays and is pure; matrices are
never mutated.  Eigenvalue work is delegated to LAPACK via numpy; the
M-matrix test uses the shift characterisation ``M = s I - B`` with ``B >= 0``
entrywise and ``s = max_i m_ii``, which is exact for Z-matrices (the minimal
real part of the spectrum of ``M`` equals ``s - rho(B)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class EigenConvergenceError(RuntimeError):
    """An iterative eigenvalue computation failed to converge."""


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by the matrix tests.

    Relative tolerances are taken against the Frobenius norm of the input.
    """

    z_offdiagonal: float = 1e-12   # off-diagonal entries within this band count as zero
    m_matrix_margin: float = 1e-9  # required spectral margin, relative
    null_residual: float = 1e-10   # max ||v.T @ L|| for the left null vector, relative
    symmetry: float = 1e-10        # max asymmetry accepted by the symmetric solver, relative
    psd_zero: float = 1e-9         # |lambda_1(Q_o)| band around zero, absolute
    lambda_floor: float = 1e-9     # strict-positivity floor for lambda_2(Q_o), lambda_1(S)


DEFAULT_TOL = Tolerances()


def _as_square(M: np.ndarray, what: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{what} must be square, got shape {M.shape}")
    return M


def is_z_matrix(M: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff every off-diagonal entry is <= 0 (within the zero band)."""
    M = _as_square(M)
    off = M - np.diag(np.diagonal(M))
    return bool((off <= tol.z_offdiagonal).all())


def _eigvals(M: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails here
        raise EigenConvergenceError(f"eigenvalue iteration did not converge: {exc}") from exc


def is_nonsingular_m_matrix(M: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff ``M`` is a Z-matrix whose spectrum lies strictly in Re > 0.

    For a Z-matrix write ``M = s I - B`` with ``s = max_i m_ii``; then ``B``
    is entrywise nonnegative and ``min Re lambda(M) = s - rho(B)`` by
    Perron-Frobenius, so the test reduces to a spectral-radius comparison.
    A 0x0 matrix is vacuously accepted.
    """
    M = _as_square(M)
    n = M.shape[0]
    if n == 0:
        return True
    if not is_z_matrix(M, tol):
        return False
    s = float(np.diagonal(M).max())
    B = s * np.eye(n) - M
    rho = float(np.abs(_eigvals(B)).max())
    margin = tol.m_matrix_margin * float(np.linalg.norm(M))
    return (s - rho) > margin


def symmetric_eigenvalues(M: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending.

    Rejects matrices whose asymmetry exceeds the tolerance; the symmetric part
    is what gets decomposed.
    """
    M = _as_square(M)
    if M.shape[0] == 0:
        return np.empty(0)
    scale = max(1.0, float(np.linalg.norm(M)))
    if float(np.abs(M - M.T).max()) > tol.symmetry * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    try:
        return np.linalg.eigvalsh(0.5 * (M + M.T))
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigenConvergenceError(f"symmetric eigenvalue iteration failed: {exc}") from exc


def spectral_norm(M: np.ndarray) -> float:
    """Largest singular value (induced 2-norm); 0.0 for empty matrices."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def left_null_eigenvector(L_ell: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Positive left eigenvector of a strongly connected Laplacian's zero eigenvalue.

    Returns ``v`` with ``v.T @ L_ell == 0`` (small residual), ``v @ 1 == 1``
    and every entry strictly positive.  Raises ``ValueError`` when the null
    space is not one-dimensional or the entries fail to come out positive --
    both symptoms of a block that is not strongly connected.
    """
    L = _as_square(L_ell, "Laplacian")
    n = L.shape[0]
    if n == 1:
        return np.array([1.0])
    scale = max(1.0, float(np.linalg.norm(L)))
    # Left null vectors of L are the columns of U with vanishing singular value.
    U, s, _ = np.linalg.svd(L)
    if s[-2] <= tol.null_residual * scale:
        raise ValueError("zero eigenvalue is not simple; block is not strongly connected")
    w = U[:, -1]
    total = float(w.sum())
    if total == 0.0:
        raise ValueError("left null vector has zero mean; block is not strongly connected")
    v = w / total
    if (v <= 0.0).any():
        raise ValueError("left null vector is not entrywise positive; block is not strongly connected")
    residual = float(np.linalg.norm(v @ L))
    if residual > tol.null_residual * scale:
        raise ValueError(f"left null vector residual {residual:.3e} exceeds tolerance")
    return v


@dataclass(frozen=True)
class LeaderLyapunovData:
    """Lyapunov data for a strongly connected leader block.

    ``lambda2_Qo`` is the second-smallest eigenvalue of ``Q_o``; for a single
    leader (1x1 block) it is ``math.inf`` by convention, since the
    disagreement norm is identically zero there.
    """

    v_o: np.ndarray
    V_o: np.ndarray
    Q_o: np.ndarray
    lambda2_Qo: float


def leader_lyapunov(L_ell: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> LeaderLyapunovData:
    """Build ``v_o``, ``V_o = diag(v_o)`` and ``Q_o = V_o L + L.T V_o``."""
    L = _as_square(L_ell, "Laplacian")
    n = L.shape[0]
    if n == 1:
        return LeaderLyapunovData(np.array([1.0]), np.array([[1.0]]), np.array([[0.0]]), math.inf)
    v = left_null_eigenvector(L, tol)
    V_o = np.diag(v)
    Q_o = V_o @ L + L.T @ V_o
    eigs = symmetric_eigenvalues(Q_o, tol)
    if abs(float(eigs[0])) > tol.psd_zero:
        raise ValueError(f"Q_o smallest eigenvalue {eigs[0]:.3e} is not zero within tolerance")
    lam2 = float(eigs[1])
    if lam2 <= tol.lambda_floor:
        raise ValueError(f"lambda_2(Q_o) = {lam2:.3e} is not positive; block is not strongly connected")
    return LeaderLyapunovData(v, V_o, Q_o, lam2)


@dataclass(frozen=True)
class FollowerLyapunovData:
    """Lyapunov data for the follower M-matrix block: diagonal ``P`` and SPD ``S``."""

    P: np.ndarray
    S: np.ndarray
    lambda1_S: float


def follower_lyapunov(M_f: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> FollowerLyapunovData:
    """Build ``P = diag(M^-T 1) diag(M^-1 1)^-1`` and ``S = P M + M.T P``.

    Requires a nonsingular M-matrix; inverse positivity then guarantees both
    blkdiag factors are strictly positive, which is verified explicitly.
    """
    M = _as_square(M_f)
    n = M.shape[0]
    if n == 0:
        raise ValueError("follower block is empty; there is nothing to construct")
    if not is_nonsingular_m_matrix(M, tol):
        raise ValueError("follower block is not a nonsingular M-matrix")
    ones = np.ones(n)
    try:
        q = np.linalg.solve(M, ones)      # M^-1 1
        w = np.linalg.solve(M.T, ones)    # M^-T 1
    except np.linalg.LinAlgError as exc:
        raise ValueError("follower block is numerically singular") from exc
    if (q <= 0.0).any() or (w <= 0.0).any():
        raise ValueError("inverse positivity failed; diagonal factors must be strictly positive")
    P = np.diag(w / q)
    S = P @ M + M.T @ P
    lam1 = float(symmetric_eigenvalues(S, tol)[0])
    if lam1 <= tol.lambda_floor:
        raise ValueError(f"lambda_1(S) = {lam1:.3e} is not positive")
    return FollowerLyapunovData(P, S, lam1)
