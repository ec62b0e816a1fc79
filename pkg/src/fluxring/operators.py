"""Sparse Hermitian operators on sector bases.

Everything here is built symmetrically: for each generated hop the
conjugate move is generated too, so matrices are exactly Hermitian (zero
defect, not merely small). Fermionic signs follow the canonical mode order
of :mod:`fluxring.basis`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse

from .basis import SectorBasis, apply_hop, hopping_moves, mode
from .errors import (
    BasisMismatch,
    FluxObstruction,
    InteractionPresent,
    PotentialPresent,
)
from .model import ModelSpec, fold_angle, validate


@dataclass(frozen=True)
class SparseHermitian:
    """Hermitian operator in compressed sparse row storage."""

    mat: sparse.csr_matrix

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def to_dense(self) -> np.ndarray:
        return self.mat.toarray()

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.mat.dot(v)

    def hermiticity_defect(self) -> float:
        """max |H - H^dagger|; zero for anything built by this module."""
        d = self.mat - self.mat.getH()
        return 0.0 if d.nnz == 0 else float(np.abs(d.data).max())

    def diagonal(self) -> np.ndarray:
        return self.mat.diagonal()


def _from_coo(dim: int, rows, cols, vals) -> SparseHermitian:
    m = sparse.coo_matrix(
        (np.asarray(vals, dtype=complex), (rows, cols)), shape=(dim, dim)
    ).tocsr()
    m.sum_duplicates()
    m.sort_indices()
    return SparseHermitian(m)


def _check_basis(spec: ModelSpec, basis: SectorBasis) -> None:
    if basis.L != spec.L or basis.N != spec.N or basis.hardcore != spec.hardcore:
        raise BasisMismatch(
            f"basis (L={basis.L}, N={basis.N}, hardcore={basis.hardcore}) does not "
            f"match model (L={spec.L}, N={spec.N}, hardcore={spec.hardcore})"
        )


def build_hamiltonian(spec: ModelSpec, basis: SectorBasis) -> SparseHermitian:
    """Many-body Hamiltonian sum_x t_x c+c + h.c. + sum V n + sum U n_up n_dn.

    In hard-core mode the interaction term is absent and the basis itself
    excludes double occupancy, which realizes the projected Hamiltonian
    P H P on the no-double-occupancy subspace.
    """
    _check_basis(spec, basis)
    t = spec.amplitudes()
    rows, cols, vals = [], [], []
    for i, j, bond, direction, sign in hopping_moves(spec, basis):
        amp = t[bond] if direction > 0 else np.conj(t[bond])
        rows.append(j)
        cols.append(i)
        vals.append(sign * amp)

    u = None if spec.hardcore else spec.u_values()
    for i, occ in enumerate(basis.states):
        d = 0.0
        for x in range(spec.L):
            n_up = (occ >> mode(x, 0)) & 1
            n_dn = (occ >> mode(x, 1)) & 1
            d += spec.V[x] * (n_up + n_dn)
            if u is not None:
                d += u[x] * n_up * n_dn
        if d != 0.0:
            rows.append(i)
            cols.append(i)
            vals.append(d)
    return _from_coo(basis.dim, rows, cols, vals)


@dataclass(frozen=True)
class FluxFamily:
    """phi-parametrized Hamiltonian family in the canonical gauge.

    The hopping structure (indices, magnitudes, fermion signs, diagonal) is
    generated once; only the terms that cross the last bond pick up the
    phase exp(+-i phi). Used by flux scans to avoid re-walking the basis at
    every grid point.
    """

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    base: np.ndarray      # real: |t| * fermion sign
    winding: np.ndarray   # +1 / -1 for terms crossing the last bond, else 0
    diag: np.ndarray

    def values(self, phi: float) -> np.ndarray:
        return self.base * np.exp(1j * phi * self.winding)

    def dense(self, phi: float) -> np.ndarray:
        h = np.zeros((self.dim, self.dim), dtype=complex)
        np.add.at(h, (self.rows, self.cols), self.values(phi))
        h[np.arange(self.dim), np.arange(self.dim)] += self.diag
        return h

    def hamiltonian(self, phi: float) -> SparseHermitian:
        rows = np.concatenate([self.rows, np.arange(self.dim)])
        cols = np.concatenate([self.cols, np.arange(self.dim)])
        vals = np.concatenate([self.values(phi), self.diag.astype(complex)])
        return _from_coo(self.dim, rows, cols, vals)


def flux_family(spec: ModelSpec, basis: SectorBasis) -> FluxFamily:
    """Build the canonical-gauge flux family for a sector (phases discarded)."""
    _check_basis(spec, basis)
    last = spec.L - 1
    rows, cols, base, winding = [], [], [], []
    for i, j, bond, direction, sign in hopping_moves(spec, basis):
        rows.append(j)
        cols.append(i)
        base.append(sign * spec.hop_mag[bond])
        winding.append(direction if bond == last else 0)

    u = None if spec.hardcore else spec.u_values()
    diag = np.zeros(basis.dim)
    for i, occ in enumerate(basis.states):
        d = 0.0
        for x in range(spec.L):
            n_up = (occ >> mode(x, 0)) & 1
            n_dn = (occ >> mode(x, 1)) & 1
            d += spec.V[x] * (n_up + n_dn)
            if u is not None:
                d += u[x] * n_up * n_dn
        diag[i] = d
    return FluxFamily(
        basis.dim,
        np.asarray(rows, dtype=np.int32),
        np.asarray(cols, dtype=np.int32),
        np.asarray(base, dtype=float),
        np.asarray(winding, dtype=np.int8),
        diag,
    )


def build_one_particle(spec: ModelSpec, phi: float | None = None) -> np.ndarray:
    """Dense L x L one-particle Hamiltonian h: h[x+1, x] = t_x, diag V.

    With phi given, the model is retuned to that flux (canonical gauge)
    before building.
    """
    t = spec.amplitudes()
    if phi is not None:
        t = np.abs(t).astype(complex)
        t[-1] *= np.exp(1j * fold_angle(phi))
    L = spec.L
    h = np.zeros((L, L), dtype=complex)
    for x in range(L):
        y = (x + 1) % L
        h[y, x] += t[x]
        h[x, y] += np.conj(t[x])
    h[np.arange(L), np.arange(L)] += np.asarray(spec.V)
    return h


def build_total_spin(basis: SectorBasis) -> SparseHermitian:
    """Total-spin operator S^2 = Sz^2 + Sz + S- S+ with S+ = sum_x c+_{x,up} c_{x,dn}.

    Commutes with every ring Hamiltonian on the same sector (spin-rotation
    invariance survives the hard-core projection).
    """
    L = basis.L
    rows, cols, vals = [], [], []
    sz = 0.5 * basis.two_sz
    for i, occ in enumerate(basis.states):
        rows.append(i)
        cols.append(i)
        vals.append(sz * sz + sz)
        for x in range(L):
            raised = apply_hop(occ, mode(x, 0), mode(x, 1))  # S+ term at x
            if raised is None:
                continue
            occ1, s1 = raised
            for y in range(L):
                lowered = apply_hop(occ1, mode(y, 1), mode(y, 0))  # S- term at y
                if lowered is None:
                    continue
                occ2, s2 = lowered
                j = basis.index.get(occ2)
                if j is not None:
                    rows.append(j)
                    cols.append(i)
                    vals.append(float(s1 * s2))
    return _from_coo(basis.dim, rows, cols, vals)


def apply_lowering(vec: np.ndarray, src: SectorBasis, dst: SectorBasis) -> np.ndarray:
    """Apply S- = sum_x c+_{x,dn} c_{x,up}, mapping two_sz -> two_sz - 2."""
    if dst.two_sz != src.two_sz - 2 or dst.L != src.L or dst.N != src.N:
        raise BasisMismatch("destination basis is not the two_sz - 2 sector")
    out = np.zeros(dst.dim, dtype=complex)
    for i, occ in enumerate(src.states):
        a = vec[i]
        if a == 0:
            continue
        for x in range(src.L):
            res = apply_hop(occ, mode(x, 1), mode(x, 0))
            if res is not None:
                j = dst.index.get(res[0])
                if j is not None:
                    out[j] += a * res[1]
    return out


def negative_envelope(H: SparseHermitian) -> SparseHermitian:
    """Replace every off-diagonal entry by -|entry|; keep the diagonal.

    The diagonal is gauge invariant, so this is the only candidate for a
    gauge-equivalent operator with non-positive off-diagonal entries.
    """
    coo = H.mat.tocoo()
    vals = np.where(coo.row == coo.col, coo.data, -np.abs(coo.data))
    return _from_coo(H.dim, coo.row, coo.col, vals)


@dataclass(frozen=True)
class DiagonalGauge:
    """Diagonal unitary g acting by conjugation H -> g H g^{-1}."""

    phases: np.ndarray  # unit-modulus complex, one per basis state

    @property
    def dim(self) -> int:
        return len(self.phases)

    def is_sign_gauge(self, tol: float = 1e-10) -> bool:
        """True when every phase is +-1 (real gauge)."""
        return bool(np.abs(np.abs(self.phases.real) - 1.0).max() <= tol
                    and np.abs(self.phases.imag).max() <= tol)

    def apply(self, H: SparseHermitian) -> SparseHermitian:
        g = sparse.diags(self.phases)
        ginv = sparse.diags(np.conj(self.phases))
        return SparseHermitian((g @ H.mat @ ginv).tocsr())

    def apply_state(self, v: np.ndarray) -> np.ndarray:
        return self.phases * v


def conjugation_residual(g: DiagonalGauge, H: SparseHermitian,
                         target: SparseHermitian) -> float:
    d = g.apply(H).mat - target.mat
    return 0.0 if d.nnz == 0 else float(np.abs(d.data).max())


def solve_sign_gauge(H: SparseHermitian, target: SparseHermitian,
                     tol: float = 1e-10) -> DiagonalGauge:
    """Find the diagonal unitary g with g H g^{-1} = target.

    Phases are fixed along a spanning tree of the connectivity graph (root
    phase 1 per component) and every remaining edge is checked; a cycle
    carrying mismatched flux raises FluxObstruction, which certifies the
    two operators are not gauge equivalent. Requires matching sparsity
    patterns and entry moduli.
    """
    if H.dim != target.dim:
        raise FluxObstruction("operators act on different dimensions")
    a = H.mat.tocsr().copy()
    b = target.mat.tocsr().copy()
    a.sort_indices()
    b.sort_indices()
    if not (np.array_equal(a.indptr, b.indptr) and np.array_equal(a.indices, b.indices)):
        raise FluxObstruction("sparsity patterns differ")
    moduli_gap = float(np.abs(np.abs(a.data) - np.abs(b.data)).max()) if a.nnz else 0.0
    if moduli_gap > tol:
        raise FluxObstruction(f"entry moduli differ by {moduli_gap:.3e}")
    diag_gap = float(np.abs(a.diagonal() - b.diagonal()).max())
    if diag_gap > tol:
        raise FluxObstruction(f"diagonals differ by {diag_gap:.3e}")

    dim = H.dim
    g = np.zeros(dim, dtype=complex)
    for root in range(dim):
        if g[root] != 0:
            continue
        g[root] = 1.0
        stack = [root]
        while stack:
            j = stack.pop()
            for k in range(a.indptr[j], a.indptr[j + 1]):
                i = a.indices[k]
                if i == j or g[i] != 0 or abs(a.data[k]) <= tol:
                    continue
                # row j holds H[j, i]; g_i = conj(T[j,i]) / conj(H[j,i]) * g_j
                ratio = np.conj(b.data[k]) / np.conj(a.data[k])
                g[i] = ratio * g[j] / abs(ratio)
                stack.append(i)

    check = DiagonalGauge(g)
    resid = conjugation_residual(check, H, target)
    scale = float(np.abs(a.data).max()) if a.nnz else 1.0
    if resid > tol * max(1.0, scale):
        raise FluxObstruction(
            f"cycle inconsistency: conjugation residual {resid:.3e} exceeds tolerance"
        )
    return check


def hole_particle_down(spec: ModelSpec) -> ModelSpec:
    """Model whose one-particle spectrum is the negation of the original's.

    Realizes the hole-particle transform for the down species: every bond
    phase shifts by pi (t -> -t), which sends flux to flux + L*pi. Feeds
    the identity between complementary lowest-eigenvalue sums checked in
    :mod:`fluxring.analysis`. Requires V = 0.
    """
    if any(v != 0.0 for v in spec.V):
        raise PotentialPresent("hole-particle transform requires V = 0")
    phases = tuple(fold_angle(p + math.pi) for p in spec.hop_phase)
    return validate(replace(spec, hop_phase=phases))


def extend_ring(spec: ModelSpec, factor: int = 2) -> ModelSpec:
    """Periodically repeat the hoppings on a ring of factor*L sites.

    The extended flux is factor times the original. Requires U = V = 0, as
    in the doubling identity this feeds.
    """
    if spec.hardcore or any(u != 0.0 for u in spec.U):
        raise InteractionPresent("ring extension requires U = 0")
    if any(v != 0.0 for v in spec.V):
        raise PotentialPresent("ring extension requires V = 0")
    return validate(
        ModelSpec(
            L=spec.L * factor,
            N=min(spec.N * factor, 2 * spec.L * factor),
            hop_mag=spec.hop_mag * factor,
            hop_phase=spec.hop_phase * factor,
            V=(0.0,) * (spec.L * factor),
            U=(0.0,) * (spec.L * factor),
        )
    )


def dump_coo(H: SparseHermitian) -> str:
    """Coordinate-format text dump: 'row col re im', 1-indexed, row-major."""
    coo = H.mat.tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [
        f"{coo.row[k] + 1} {coo.col[k] + 1} {coo.data[k].real!r} {coo.data[k].imag!r}"
        for k in order
    ]
    return "\n".join(lines) + "\n"
