"""Constant-control interpolation between PSD Hermitian endpoints.

Finds a constant skew-Hermitian rotation generator X and a commuting drift
Z ([rho0, Z] = 0, trace Z = 0) with e^X (rho0 + Z) e^{-X} = rho1, minimizing
||X||_F + epsilon ||Z||_F.  The path rho(t) = e^{Xt}(rho0 + Zt)e^{-Xt} then
rotates eigenvectors at a constant rate while the eigenvalues drift
linearly, and stays PSD because each eigenvalue is a convex combination of
endpoint eigenvalues.

Because Z commutes with rho0, feasibility forces the spectrum of rho0 + Z
to be a permutation pi of the spectrum of rho1.  The search therefore
splits into a finite matching problem (which eigenvalue goes where, fixing
z_i = mu_{pi(i)} - lambda_i) and, per matching, a smooth gauge problem:
among all unitaries Theta commuting with the matched spectrum, minimize the
norm of the principal logarithm of U1 Theta U0'*.  When rho0 has repeated
eigenvalues the eigenframe of Z is pinned to the computed eigenbasis of
rho0, so minimality is within that family.
"""

from __future__ import annotations

import itertools
import os
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import golden, linear_sum_assignment

from .linalg import (
    BranchAmbiguityError,
    degeneracy_groups,
    eig_hermitian,
    expm_skew,
    frob_norm,
    hermitian_part,
    is_hermitian,
    logm_unitary,
)

_TIE = 1e-12


class InfeasibleError(ValueError):
    """No commuting-drift path joins the endpoints (trace mismatch)."""


class CostBreakdown(NamedTuple):
    rotation: float
    scaling: float
    total: float


def path_cost(X: np.ndarray, Z: np.ndarray, epsilon: float) -> CostBreakdown:
    """Objective split: (||X||_F, ||Z||_F, ||X||_F + epsilon*||Z||_F)."""
    rot = frob_norm(X)
    scale = frob_norm(Z)
    return CostBreakdown(rot, scale, rot + epsilon * scale)


@dataclass(frozen=True)
class GeodesicSolution:
    """Constant controls joining two endpoints, with the matching used."""

    X: np.ndarray
    Z: np.ndarray
    permutation: tuple[int, ...]
    epsilon: float
    cost_rotation: float
    cost_scaling: float
    cost_total: float


def _log_norm(Q: np.ndarray) -> float:
    """||log Q||_F for unitary Q, via |phase| = arccos of cosine eigenvalues.

    Only phase magnitudes enter the norm, so the Hermitian part of Q
    suffices; no branch bookkeeping is needed.  This scoring helper runs
    inside the gauge search's hot loop, so it uses LAPACK eigenvalues
    directly; the returned generator itself still goes through the
    package's own logm_unitary.  Absolute accuracy degrades to ~sqrt(eps)
    for phases near zero (arccos near 1), which only matters below any
    tolerance used here.
    """
    c = np.linalg.eigvalsh(hermitian_part(Q))
    return float(np.sqrt(np.sum(np.arccos(np.clip(c, -1.0, 1.0)) ** 2)))


def _log_norms(Qs: np.ndarray) -> np.ndarray:
    """Batched _log_norm over a stack of unitaries."""
    H = (Qs + np.conj(np.swapaxes(Qs, -1, -2))) / 2
    c = np.linalg.eigvalsh(H)
    return np.sqrt((np.arccos(np.clip(c, -1.0, 1.0)) ** 2).sum(axis=-1))


def _group_slices(labels: np.ndarray) -> list[np.ndarray]:
    return [np.flatnonzero(labels == g) for g in range(labels[-1] + 1)] if len(labels) else []


def _polar_init(G: np.ndarray, groups: list[np.ndarray]) -> np.ndarray:
    """Blockwise unitary polar factors of G's diagonal blocks."""
    Theta = np.zeros_like(G)
    for idx in groups:
        B = G[np.ix_(idx, idx)]
        if len(idx) == 1:
            a = B[0, 0]
            Theta[idx[0], idx[0]] = a / abs(a) if abs(a) > 1e-12 else 1.0
        else:
            W, _, Vh = np.linalg.svd(B)
            Theta[np.ix_(idx, idx)] = W @ Vh
    return Theta


def _apply_gauge(Theta: np.ndarray, coord: tuple, a: float) -> np.ndarray:
    """Right-multiply Theta by a one-parameter gauge element."""
    out = Theta.copy()
    if coord[0] == "ph":
        out[:, coord[1]] *= np.exp(1j * a)
        return out
    _, k, l = coord
    ck, cl = Theta[:, k].copy(), Theta[:, l].copy()
    c, s = np.cos(a), np.sin(a)
    if coord[0] == "re":
        out[:, k] = c * ck + s * cl
        out[:, l] = -s * ck + c * cl
    else:  # "im"
        out[:, k] = c * ck + 1j * s * cl
        out[:, l] = 1j * s * ck + c * cl
    return out


_GRID = np.linspace(-np.pi, np.pi, 25)


def _gauge_search(
    U0p: np.ndarray,
    U1: np.ndarray,
    spectrum: np.ndarray,
    degeneracy_tol: float = 1e-8,
    rounds: int = 3,
    sign_limit: int = 12,
) -> tuple[float, np.ndarray]:
    """Minimize ||log(U1 Theta U0p*)||_F over gauges Theta commuting with
    diag(spectrum).  Returns (cost, Theta)."""
    n = U0p.shape[0]
    U0pH = U0p.conj().T
    labels = degeneracy_groups(np.asarray(spectrum, dtype=float), degeneracy_tol)
    groups = _group_slices(labels)

    def cost_of(Theta):
        return _log_norm(U1 @ Theta @ U0pH)

    coords: list[tuple] = [("ph", k) for k in range(n)]
    for idx in groups:
        for a_, b_ in itertools.combinations(idx.tolist(), 2):
            coords.append(("re", a_, b_))
            coords.append(("im", a_, b_))

    G = U1.conj().T @ U0p
    starts = [_polar_init(G, groups), np.eye(n, dtype=complex)]

    real_inputs = (
        np.max(np.abs(U0p.imag)) <= 1e-12 and np.max(np.abs(U1.imag)) <= 1e-12
    )
    if real_inputs and n <= sign_limit:
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=n)))
        cands = np.zeros((len(signs), n, n), dtype=complex)
        cands[:, np.arange(n), np.arange(n)] = signs
        costs = _log_norms(U1[None] @ cands @ U0pH[None])
        # first strict minimum keeps the enumeration-order tie-break
        j = int(np.argmin(costs))
        starts.append(cands[j])

    best_cost, best_Theta = np.inf, None
    for Theta0 in starts:
        Theta = Theta0.copy()
        cur = cost_of(Theta)
        for _ in range(rounds):
            improved = False
            for coord in coords:
                f = lambda a: cost_of(_apply_gauge(Theta, coord, a))
                cands = np.stack([_apply_gauge(Theta, coord, a) for a in _GRID])
                vals = _log_norms(U1[None] @ cands @ U0pH[None])
                j = int(np.argmin(vals))
                h = _GRID[1] - _GRID[0]
                xmin, fmin, _ = golden(
                    f, brack=(_GRID[j] - h, _GRID[j], _GRID[j] + h),
                    tol=1e-10, full_output=True,
                )
                if vals[j] < fmin:
                    xmin, fmin = float(_GRID[j]), float(vals[j])
                # acceptance threshold sits above the ~sqrt(eps) noise
                # floor of the arccos-based score near zero phases
                if fmin < cur - 1e-9:
                    Theta = _apply_gauge(Theta, coord, float(xmin))
                    cur = fmin
                    improved = True
            if not improved:
                break
        if cur < best_cost - _TIE:
            best_cost, best_Theta = cur, Theta
    return best_cost, best_Theta


def minimal_rotation(
    U0p: np.ndarray,
    U1: np.ndarray,
    spectrum: np.ndarray,
    degeneracy_tol: float = 1e-8,
    rounds: int = 3,
) -> np.ndarray:
    """Smallest-norm X with e^X mapping the frame U0p onto U1 up to gauge.

    Columns of U0p and U1 must pair identical ``spectrum`` entries.  The
    residual freedom — unitaries commuting with diag(spectrum): per-column
    phases, full blocks on repeated entries, and diagonal sign patterns for
    real frames — is searched to minimize the log norm.  Raises
    BranchAmbiguityError if the optimal alignment has an eigenphase at the
    principal-branch cut (callers may retry via a gauge nudge).
    """
    _, Theta = _gauge_search(U0p, U1, spectrum, degeneracy_tol, rounds)
    return logm_unitary(U1 @ Theta @ U0p.conj().T)


def _matching_candidates(lam, mu, n, max_enum, eval_total):
    """Permutations to try: exhaustive below max_enum, else assignment + 2-swap."""
    if n <= max_enum:
        return [tuple(p) for p in itertools.permutations(range(n))]
    _, seed = linear_sum_assignment(np.abs(lam[:, None] - mu[None, :]))
    perm = list(seed)
    score = eval_total(tuple(perm))
    for _ in range(50):
        best_swap, best_score = None, score
        for i, j in itertools.combinations(range(n), 2):
            cand = perm.copy()
            cand[i], cand[j] = cand[j], cand[i]
            s = eval_total(tuple(cand))
            if s < best_score - _TIE:
                best_swap, best_score = cand, s
        if best_swap is None:
            break
        perm, score = best_swap, best_score
    return [tuple(perm)]


def solve_geodesic(
    rho0: np.ndarray,
    rho1: np.ndarray,
    epsilon: float,
    max_enum: int | None = None,
    degeneracy_tol: float = 1e-8,
) -> GeodesicSolution:
    """Minimize ||X||_F + epsilon*||Z||_F over constant controls joining
    rho0 to rho1 along e^{Xt}(rho0 + Zt)e^{-Xt}.

    Endpoints must be Hermitian PSD with equal traces (a commuting
    traceless drift cannot change the trace).  ``max_enum`` caps exhaustive
    eigenvalue-matching enumeration (default 7, overridable through the
    DENFLOW_MAX_ENUM environment variable); larger problems fall back to an
    assignment seed refined by 2-swap local search.  Ties are broken by
    matching enumeration order, preferring smaller ||Z|| at equal cost.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    rho1 = np.asarray(rho1, dtype=complex)
    if not (is_hermitian(rho0) and is_hermitian(rho1)):
        raise ValueError("endpoints must be Hermitian")
    if rho0.shape != rho1.shape:
        raise ValueError(f"dimension mismatch: {rho0.shape} vs {rho1.shape}")
    tr0, tr1 = float(np.trace(rho0).real), float(np.trace(rho1).real)
    if abs(tr0 - tr1) > 1e-8 * max(1.0, abs(tr0), abs(tr1)):
        raise InfeasibleError(
            f"traces differ ({tr0:.12g} vs {tr1:.12g}); "
            "equal trace is required for a commuting-drift path"
        )
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if max_enum is None:
        max_enum = int(os.environ.get("DENFLOW_MAX_ENUM", 7))

    n = rho0.shape[0]
    lam, U0 = eig_hermitian(rho0)
    mu, U1 = eig_hermitian(rho1)

    best = None  # (total, znorm, perm, z, U0p, Theta)

    def frame_for(perm):
        P = np.zeros((n, n))
        P[np.arange(n), perm] = 1.0
        return U0 @ P

    def consider(perm):
        nonlocal best
        z = mu[list(perm)] - lam
        znorm = float(np.linalg.norm(z))
        if best is not None and epsilon * znorm > best[0] - _TIE:
            return  # rotation cost is nonnegative: cannot beat incumbent
        U0p = frame_for(perm)
        gcost, Theta = _gauge_search(U0p, U1, mu, degeneracy_tol)
        total = gcost + epsilon * znorm
        if best is None or total < best[0] - _TIE or (
            abs(total - best[0]) <= _TIE and znorm < best[1] - _TIE
        ):
            best = (total, znorm, perm, z, U0p, Theta)

    def eval_total(perm):
        # quick score for local search: polar-init alignment, no descent
        z = mu[list(perm)] - lam
        U0p = frame_for(perm)
        G = U1.conj().T @ U0p
        labels = degeneracy_groups(mu, degeneracy_tol)
        Theta = _polar_init(G, _group_slices(labels))
        return _log_norm(U1 @ Theta @ U0p.conj().T) + epsilon * float(np.linalg.norm(z))

    for perm in _matching_candidates(lam, mu, n, max_enum, eval_total):
        consider(perm)

    _, _, perm, z, U0p, Theta = best
    X = None
    nudges = (0.0, 1e-6, 3e-6, 1e-5, 3e-5, 1e-4, 1e-3)
    for k, delta in enumerate(nudges):
        # right-multiplying Theta by diagonal phases is a commuting gauge:
        # feasibility is preserved exactly, the nudge only steps off the
        # branch cut at the price of an O(delta) cost increase
        phases = np.exp(1j * delta * np.arange(1, n + 1))
        try:
            X = logm_unitary(U1 @ (Theta * phases[None, :]) @ U0p.conj().T)
            break
        except BranchAmbiguityError:
            if k == len(nudges) - 1:
                raise

    Z = hermitian_part(U0 @ (z[:, None] * U0.conj().T))
    costs = path_cost(X, Z, epsilon)
    return GeodesicSolution(
        X=X,
        Z=Z,
        permutation=tuple(int(p) for p in perm),
        epsilon=float(epsilon),
        cost_rotation=costs.rotation,
        cost_scaling=costs.scaling,
        cost_total=costs.total,
    )


def eval_path(sol: GeodesicSolution, rho0: np.ndarray, t: float) -> np.ndarray:
    """Point on the interpolating path: e^{Xt}(rho0 + Zt)e^{-Xt}."""
    if t < 0.0 or t > 1.0:
        warnings.warn(
            f"t={t} outside [0, 1]: extrapolated eigenvalues may go negative",
            stacklevel=2,
        )
    U = expm_skew(sol.X * t)
    return hermitian_part(U @ (np.asarray(rho0, dtype=complex) + sol.Z * t) @ U.conj().T)


def sample_path(sol: GeodesicSolution, rho0: np.ndarray, times) -> np.ndarray:
    """Path evaluated at many times from a single eigendecomposition of X."""
    ts = np.asarray(times, dtype=float)
    theta, W = eig_hermitian(-1j * sol.X)
    WH = W.conj().T
    rho0 = np.asarray(rho0, dtype=complex)
    out = np.empty((len(ts), *rho0.shape), dtype=complex)
    for i, t in enumerate(ts):
        U = (W * np.exp(1j * theta * t)) @ WH
        out[i] = hermitian_part(U @ (rho0 + sol.Z * t) @ U.conj().T)
    return out
