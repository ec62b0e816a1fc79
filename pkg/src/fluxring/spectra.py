"""Eigenvalue engines: ground states with degeneracy, lowest-level sums,
full spectra and canonical partition functions.

The dense path (numpy eigh) runs up to DENSE_LIMIT; above that a Lanczos
iteration with full reorthogonalization and a deterministic start vector
takes over. Degenerate ground levels are resolved by deflation: converged
vectors are locked and the iteration restarts in their orthogonal
complement until the next level clears the degeneracy gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptySector, NoConvergence, TooLargeForDense
from .model import ModelSpec, fold_angle
from .operators import SparseHermitian, build_one_particle

#: Largest dimension handled by the dense eigensolver.
DENSE_LIMIT = 2000

#: Relative width of the ground-level window: eigenvalues within
#: GROUND_TOL * max(1, |E_min|) of E_min count as degenerate ground states.
GROUND_TOL = 1e-9

#: Seed for the deterministic Lanczos start vector.
LANCZOS_SEED = 0x5EED


@dataclass(frozen=True)
class GroundInfo:
    """Lowest eigenvalue with its degeneracy, eigenvectors and spin content."""

    energy: float
    degeneracy: int
    gap: float
    vectors: np.ndarray | None          # (dim, k) orthonormal columns
    spin_content: tuple[float, ...] | None
    method: str

    def spins(self) -> set[float]:
        if self.spin_content is None:
            raise ValueError("ground state was computed without a spin operator")
        return set(self.spin_content)


@dataclass(frozen=True)
class FluxCurve:
    """A sampled map phi -> scalar on a uniform grid over [0, 2*pi)."""

    grid: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values differ in length")
        if len(self.grid) == 0 or self.grid[0] != 0.0:
            raise ValueError("grid must start at 0")
        if np.any(np.diff(self.grid) <= 0) or self.grid[-1] >= 2 * math.pi:
            raise ValueError("grid must increase strictly within [0, 2*pi)")

    def minimum(self) -> tuple[float, float]:
        k = int(np.argmin(self.values))
        return float(self.grid[k]), float(self.values[k])


def _spin_from_s2(value: float, tol: float = 1e-8) -> float:
    """Invert s(s+1) = value onto the nearest (half-)integer spin."""
    s = 0.5 * (-1.0 + math.sqrt(max(0.0, 1.0 + 4.0 * value)))
    snapped = round(2.0 * s) / 2.0
    if abs(snapped * (snapped + 1.0) - value) > tol * max(1.0, abs(value)):
        raise ValueError(f"S^2 eigenvalue {value} is not of the form s(s+1)")
    return snapped


def _spin_content(vectors: np.ndarray, s2: SparseHermitian) -> tuple[float, ...]:
    """Diagonalize S^2 projected onto the span of the given columns."""
    block = vectors.conj().T @ s2.matvec(vectors)
    vals = np.linalg.eigvalsh(0.5 * (block + block.conj().T))
    return tuple(sorted(_spin_from_s2(float(v)) for v in vals))


def ground(H: SparseHermitian, want_vectors: bool = True, max_degeneracy: int = 8,
           method: str = "auto", s2: SparseHermitian | None = None) -> GroundInfo:
    """Lowest eigenvalue of H with degeneracy counting.

    method is "dense", "lanczos" or "auto" (dense up to DENSE_LIMIT).
    When s2 is given (and vectors are computed), the spin content of the
    ground eigenspace is obtained by diagonalizing the projected S^2.
    """
    dim = H.dim
    if dim < 1:
        raise EmptySector("operator has dimension 0")
    if method == "auto":
        method = "dense" if dim <= DENSE_LIMIT else "lanczos"
    want_vectors = want_vectors or s2 is not None

    if method == "dense":
        dense = H.to_dense()
        if want_vectors:
            vals, vecs = np.linalg.eigh(dense)
        else:
            vals, vecs = np.linalg.eigvalsh(dense), None
        e0 = float(vals[0])
        window = GROUND_TOL * max(1.0, abs(e0))
        deg = int(np.searchsorted(vals, e0 + window, side="right"))
        deg = max(deg, 1)
        gap = float(vals[deg] - e0) if deg < dim else math.inf
        vectors = vecs[:, :deg] if vecs is not None else None
    else:
        e0, vectors, gap = _lanczos_ground(H, max_degeneracy=max_degeneracy)
        deg = vectors.shape[1] if vectors is not None else 1
        if not want_vectors:
            vectors = None

    spin = _spin_content(vectors, s2) if (s2 is not None and vectors is not None) else None
    return GroundInfo(e0, deg, gap, vectors, spin, method)


def _lanczos_pass(H: SparseHermitian, locked: np.ndarray | None,
                  value_tol: float = 1e-14, max_iter: int = 600):
    """One deflated Lanczos run: lowest Ritz pair orthogonal to the locked rows.

    Full reorthogonalization against the whole Krylov basis and the locked
    set. The start vector is pseudo-random from a fixed seed, so repeated
    runs are bit-for-bit identical at a fixed thread count.
    """
    from scipy.linalg import eigh_tridiagonal

    dim = H.dim
    n_locked = 0 if locked is None else locked.shape[0]
    rng = np.random.default_rng(LANCZOS_SEED + n_locked)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)

    budget = min(max_iter, dim - n_locked)
    space_limited = budget == dim - n_locked
    Q = np.empty((budget, dim), dtype=complex)

    def orthogonalize(w, k):
        # two passes: classical Gram-Schmidt twice is numerically sufficient
        for _ in range(2):
            if locked is not None:
                w -= locked.T @ (locked.conj() @ w)
            if k >= 0:
                w -= Q[: k + 1].T @ (Q[: k + 1].conj() @ w)
        return w

    v = orthogonalize(v, -1)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise NoConvergence("start vector lies entirely in the locked space")
    v /= nv

    alphas: list[float] = []
    betas: list[float] = []
    theta_last = None
    for k in range(budget):
        Q[k] = v
        w = H.matvec(v)
        a = float(np.vdot(v, w).real)
        alphas.append(a)
        w -= a * v
        if k > 0:
            w -= betas[-1] * Q[k - 1]
        w = orthogonalize(w, k)
        b = float(np.linalg.norm(w))

        scale = max(1.0, max(abs(x) for x in alphas))
        breakdown = b <= 1e-13 * scale
        if breakdown or k == budget - 1 or k % 5 == 4:
            vals, vecs = eigh_tridiagonal(
                alphas, betas, select="i", select_range=(0, 0)
            )
            theta = float(vals[0])
            y = vecs[:, 0]
            resid = abs(b * y[-1])
            stalled = (
                theta_last is not None
                and abs(theta - theta_last) <= value_tol * max(1.0, abs(theta))
                and resid <= 1e-8 * max(1.0, abs(theta))
            )
            if stalled or breakdown or (space_limited and k == budget - 1):
                vec = Q[: k + 1].T @ y
                vec = orthogonalize(vec, -1) if locked is not None else vec
                vec /= np.linalg.norm(vec)
                return theta, vec
            if k == budget - 1:
                raise NoConvergence(
                    f"Lanczos exhausted {budget} iterations", residual=resid
                )
            theta_last = theta
        betas.append(b)
        v = w / b

    raise NoConvergence("Lanczos failed to produce a Ritz pair")


def _lanczos_ground(H: SparseHermitian, max_degeneracy: int):
    """Ground energy, ground vectors and gap via deflated Lanczos passes.

    After each converged vector the iteration restarts in the orthogonal
    complement; the loop stops once the next level clears the degeneracy
    window (or max_degeneracy + 1 vectors are locked, meaning the reported
    degeneracy is a lower bound).
    """
    locked: list[np.ndarray] = []
    e0 = None
    gap = math.inf
    for _ in range(max_degeneracy + 1):
        if len(locked) >= H.dim:
            break
        stack = np.vstack(locked) if locked else None
        theta, vec = _lanczos_pass(H, stack)
        if e0 is None:
            e0 = theta
        elif theta > e0 + GROUND_TOL * max(1.0, abs(e0)):
            gap = theta - e0
            break
        locked.append(vec)
    vectors = np.column_stack(locked) if locked else None
    return float(e0), vectors, float(gap)


def lowest_sum(spec: ModelSpec, K: int, phi: float) -> float:
    """Sum of the K lowest one-particle eigenvalues at total flux phi."""
    if K < 0 or K > spec.L:
        raise ValueError(f"K={K} outside [0, L={spec.L}]")
    if K == 0:
        return 0.0
    vals = np.linalg.eigvalsh(build_one_particle(spec, phi=fold_angle(phi)))
    return float(vals[:K].sum())


def one_particle_levels(spec: ModelSpec, phi: float | None = None) -> np.ndarray:
    """All eigenvalues of h, ascending."""
    return np.linalg.eigvalsh(build_one_particle(spec, phi=phi))


def full_spectrum(H: SparseHermitian) -> np.ndarray:
    """All eigenvalues, ascending. Dense only."""
    if H.dim > DENSE_LIMIT:
        raise TooLargeForDense(f"dim {H.dim} exceeds dense limit {DENSE_LIMIT}")
    return np.linalg.eigvalsh(H.to_dense())


def log_canonical_partition(H: SparseHermitian, beta: float) -> float:
    """log Tr exp(-beta H), evaluated as -beta*E_min + log sum exp(-beta (E - E_min)).

    The shift keeps the sum representable at any beta >= 0.
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    vals = full_spectrum(H)
    e_min = float(vals[0])
    shifted = np.exp(-beta * (vals - e_min))
    return float(-beta * e_min + math.log(shifted.sum()))


def canonical_partition(H: SparseHermitian, beta: float) -> float:
    """Tr exp(-beta H) over the sector, via the shifted (overflow-safe) sum."""
    return math.exp(log_canonical_partition(H, beta))
