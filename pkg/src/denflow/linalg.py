"""Dense complex linear algebra kernels for small Hermitian/unitary matrices.

Everything here is self-contained (no LAPACK): a cyclic complex Jacobi
eigensolver for Hermitian matrices, the exponential of skew-Hermitian
matrices, the principal logarithm of unitary matrices, commutators and the
Frobenius (trace) inner product.  Matrices are plain ``numpy`` arrays of
``complex`` dtype; targeted sizes are n ~ 2..10, where Jacobi is simple,
accurate and deterministic.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class EigenConvergenceError(RuntimeError):
    """Jacobi sweeps did not reduce the off-diagonal below tolerance."""

    def __init__(self, offdiag: float, sweeps: int):
        super().__init__(
            f"eigensolver did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {offdiag:.3e})"
        )
        self.offdiag = offdiag
        self.sweeps = sweeps


class BranchAmbiguityError(ValueError):
    """A unitary eigenphase sits at the principal-branch cut near -pi.

    The sign of such a phase is not stable under perturbations of the
    input; callers may retry after perturbing the matrix (or a gauge).
    """

    def __init__(self, phase: float):
        super().__init__(f"eigenphase {phase:.12f} is within tolerance of -pi")
        self.phase = phase


class EigenDecomposition(NamedTuple):
    """Eigenvalues ascending; column k of ``vectors`` pairs with ``values[k]``."""

    values: np.ndarray
    vectors: np.ndarray


def hermitian_part(A: np.ndarray) -> np.ndarray:
    """Return (A + A*)/2."""
    A = np.asarray(A, dtype=complex)
    return (A + A.conj().T) / 2


def skew_part(A: np.ndarray) -> np.ndarray:
    """Return (A - A*)/2."""
    A = np.asarray(A, dtype=complex)
    return (A - A.conj().T) / 2


def is_hermitian(A: np.ndarray, tol: float = 1e-12) -> bool:
    A = np.asarray(A, dtype=complex)
    return float(np.linalg.norm(A - A.conj().T)) <= tol * max(1.0, float(np.linalg.norm(A)))


def is_skew_hermitian(X: np.ndarray, tol: float = 1e-12) -> bool:
    X = np.asarray(X, dtype=complex)
    return float(np.linalg.norm(X + X.conj().T)) <= tol * max(1.0, float(np.linalg.norm(X)))


def is_unitary(Q: np.ndarray, tol: float = 1e-10) -> bool:
    Q = np.asarray(Q, dtype=complex)
    n = Q.shape[0]
    return float(np.linalg.norm(Q.conj().T @ Q - np.eye(n))) <= tol


def frob_inner(A: np.ndarray, B: np.ndarray) -> float:
    """Real trace inner product Re(trace(A* B))."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return float(np.vdot(A, B).real)


def frob_norm(A: np.ndarray) -> float:
    """Frobenius norm sqrt(trace(A* A))."""
    return float(np.linalg.norm(np.asarray(A)))


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """[A, B] = AB - BA."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B - B @ A


def _phase_fix(V: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    V = V.copy()
    for k in range(V.shape[1]):
        j = int(np.argmax(np.abs(V[:, k])))
        a = V[j, k]
        r = abs(a)
        if r > 0.0:
            V[:, k] *= a.conjugate() / r
    return V


def _eig2(A: np.ndarray) -> EigenDecomposition:
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix."""
    a = A[0, 0].real
    d = A[1, 1].real
    b = A[0, 1]
    ab = abs(b)
    scale = max(abs(a), abs(d), ab, 1e-300)
    if ab <= 1e-18 * scale:
        if a <= d:
            return EigenDecomposition(np.array([a, d]), np.eye(2, dtype=complex))
        return EigenDecomposition(
            np.array([d, a]), np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        )
    m = 0.5 * (a + d)
    r = np.hypot(0.5 * (a - d), ab)
    lo, hi = m - r, m + r
    # columns of (A - lo*I) span the hi-eigenvector; pick the better conditioned
    c0 = np.array([hi - d, b.conjugate()])
    c1 = np.array([b, hi - a])
    v = c0 if np.linalg.norm(c0) >= np.linalg.norm(c1) else c1
    v = v / np.linalg.norm(v)
    w = np.array([-v[1].conjugate(), v[0].conjugate()])
    V = _phase_fix(np.column_stack([w, v]))
    return EigenDecomposition(np.array([lo, hi]), V)


def eig_hermitian(
    A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100
) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.

    The input is symmetrized first.  Sweeps stop when the off-diagonal
    Frobenius mass falls below ``tol * ||A||_F``.  Eigenvalues are returned
    ascending; ties are resolved deterministically and each eigenvector is
    phase-fixed (largest-magnitude component real positive), so the result
    is reproducible bit-for-bit for a fixed input.
    """
    A = hermitian_part(A)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if n == 1:
        return EigenDecomposition(A.real.diagonal().copy(), np.eye(1, dtype=complex))
    if n == 2:
        return _eig2(A)

    work = A.copy()
    V = np.eye(n, dtype=complex)
    norm = frob_norm(work)
    if norm == 0.0:
        return EigenDecomposition(np.zeros(n), V)
    thresh = tol * norm
    skip = thresh / (2.0 * n)

    off = _offdiag_norm(work)
    sweeps = 0
    while off > thresh:
        if sweeps >= max_sweeps:
            raise EigenConvergenceError(off, sweeps)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                if abs(apq) <= skip:
                    continue
                u = _jacobi_rotation(work[p, p].real, work[q, q].real, apq)
                work[:, [p, q]] = work[:, [p, q]] @ u
                work[[p, q], :] = u.conj().T @ work[[p, q], :]
                work[p, q] = 0.0
                work[q, p] = 0.0
                work[p, p] = work[p, p].real
                work[q, q] = work[q, q].real
                V[:, [p, q]] = V[:, [p, q]] @ u
        sweeps += 1
        off = _offdiag_norm(work)

    values = work.real.diagonal().copy()
    order = np.argsort(values, kind="stable")
    return EigenDecomposition(values[order], _phase_fix(V[:, order]))


def _offdiag_norm(A: np.ndarray) -> float:
    off = A - np.diag(A.diagonal())
    return float(np.linalg.norm(off))


def _jacobi_rotation(app: float, aqq: float, apq: complex) -> np.ndarray:
    """2x2 unitary zeroing the (p,q) entry of a Hermitian pair."""
    absa = abs(apq)
    phi = apq / absa
    tau = (aqq - app) / (2.0 * absa)
    if tau >= 0.0:
        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # dephase then rotate: u = diag(1, conj(phi)) @ [[c, s], [-s, c]]
    return np.array([[c, s], [-s * phi.conjugate(), c * phi.conjugate()]])


def expm_skew(X: np.ndarray) -> np.ndarray:
    """exp(X) for skew-Hermitian X, via the Hermitian eigenproblem of -iX."""
    X = np.asarray(X, dtype=complex)
    theta, W = eig_hermitian(-1j * X)
    return (W * np.exp(1j * theta)) @ W.conj().T


def eig_unitary(Q: np.ndarray, cluster_tol: float = 1e-6) -> EigenDecomposition:
    """Eigenphases (in (-pi, pi], ascending) and eigenvectors of a unitary Q.

    Diagonalizes the commuting Hermitian pair (Q+Q*)/2 and (Q-Q*)/2i
    jointly: eigenspaces of the cosine part are refined by the sine part,
    which separates phases +t and -t that share a cosine.
    """
    Q = np.asarray(Q, dtype=complex)
    n = Q.shape[0]
    C = hermitian_part(Q)
    S = hermitian_part((Q - Q.conj().T) / 2j)
    cvals, W = eig_hermitian(C)
    W = W.copy()

    start = 0
    while start < n:
        stop = start + 1
        while stop < n and cvals[stop] - cvals[start] <= cluster_tol:
            stop += 1
        if stop - start > 1:
            block = W[:, start:stop]
            B = hermitian_part(block.conj().T @ S @ block)
            _, U = eig_hermitian(B)
            W[:, start:stop] = block @ U
        start = stop

    cos = np.einsum("ik,ik->k", W.conj(), C @ W).real
    sin = np.einsum("ik,ik->k", W.conj(), S @ W).real
    phases = np.arctan2(sin, cos)
    order = np.argsort(phases, kind="stable")
    return EigenDecomposition(phases[order], _phase_fix(W[:, order]))


def logm_unitary(Q: np.ndarray, branch_tol: float = 1e-8) -> np.ndarray:
    """Principal logarithm of a unitary matrix: eigenphases taken in (-pi, pi].

    Raises :class:`BranchAmbiguityError` if an eigenphase lies within
    ``branch_tol`` of -pi, where the branch choice is unstable.
    """
    phases, W = eig_unitary(Q)
    if len(phases):
        worst = float(phases[np.argmax(np.abs(phases))])
        # the cut at -pi is the point |phase| = pi on the circle
        if np.pi - abs(worst) < branch_tol:
            raise BranchAmbiguityError(worst)
    return skew_part((W * (1j * phases)) @ W.conj().T)


def degeneracy_groups(values: np.ndarray, degeneracy_tol: float = 1e-8) -> np.ndarray:
    """Cluster labels for ascending values, chaining gaps below tol*max|values|."""
    values = np.asarray(values, dtype=float)
    thresh = degeneracy_tol * np.max(np.abs(values), initial=0.0)
    labels = np.zeros(len(values), dtype=int)
    for k in range(1, len(values)):
        same = values[k] - values[k - 1] <= thresh
        labels[k] = labels[k - 1] + (0 if same else 1)
    return labels


# --- packing between structured matrices and real parameter vectors ---


def herm_to_vec(A: np.ndarray) -> np.ndarray:
    """Flatten a Hermitian matrix into n^2 real parameters."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    iu = np.triu_indices(n, k=1)
    return np.concatenate([A.diagonal().real, A[iu].real, A[iu].imag])


def vec_to_herm(v: np.ndarray, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    m = n * (n - 1) // 2
    A = np.zeros((n, n), dtype=complex)
    np.fill_diagonal(A, v[:n])
    iu = np.triu_indices(n, k=1)
    upper = v[n : n + m] + 1j * v[n + m :]
    A[iu] = upper
    A[(iu[1], iu[0])] = upper.conjugate()
    return A


def skew_to_vec(X: np.ndarray) -> np.ndarray:
    """Flatten a skew-Hermitian matrix into n^2 real parameters."""
    X = np.asarray(X, dtype=complex)
    n = X.shape[0]
    iu = np.triu_indices(n, k=1)
    return np.concatenate([X.diagonal().imag, X[iu].real, X[iu].imag])


def vec_to_skew(v: np.ndarray, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    m = n * (n - 1) // 2
    X = np.zeros((n, n), dtype=complex)
    np.fill_diagonal(X, 1j * v[:n])
    iu = np.triu_indices(n, k=1)
    upper = v[n : n + m] + 1j * v[n + m :]
    X[iu] = upper
    X[(iu[1], iu[0])] = -upper.conjugate()
    return X
