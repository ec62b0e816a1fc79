import math

import numpy as np
import pytest
from scipy import sparse

import fluxring as fr
from fluxring.errors import (
    BasisMismatch,
    FluxObstruction,
    InteractionPresent,
    PotentialPresent,
)
from fluxring.operators import SparseHermitian, conjugation_residual, dump_coo

from oracles import DenseOracle, fourier_levels, filled_sum

PI = math.pi


def random_spec(seed, L=5, N=3, umax=3.0):
    rng = np.random.default_rng(seed)
    return fr.make_spec(L, N, rng.uniform(0.5, 2.0, L), rng.uniform(0, 2 * PI, L),
                        rng.normal(0.0, 1.0, L), rng.uniform(-umax, umax, L))


def test_one_particle_matches_n1_sector():
    spec = random_spec(0, L=3, N=1)
    basis = fr.enumerate_sector(3, 1, 1)
    many = fr.build_hamiltonian(spec, basis).to_dense()
    assert np.abs(many - fr.build_one_particle(spec)).max() < 1e-15


def test_free_ground_energy_l4():
    spec = fr.make_spec(4, 2)
    basis = fr.enumerate_sector(4, 2, 0)
    info = fr.ground(fr.build_hamiltonian(spec, basis), want_vectors=False)
    # two particles in the lowest level 2cos(2pi k/4) = -2
    assert info.energy == pytest.approx(-4.0, abs=1e-12)


def test_spectrum_against_independent_dense_oracle():
    spec = fr.make_spec(3, 2, U=4.0)
    basis = fr.enumerate_sector(3, 2, 0)
    assert basis.dim == 9
    ours = fr.full_spectrum(fr.build_hamiltonian(spec, basis))
    oracle = DenseOracle(3, spec.amplitudes(), spec.V, spec.U)
    theirs = np.linalg.eigvalsh(oracle.hamiltonian(1, 1))
    assert np.abs(ours - theirs).max() < 1e-10


@pytest.mark.parametrize("seed", range(4))
def test_random_spectra_against_oracle(seed):
    spec = random_spec(seed, L=4, N=3)
    basis = fr.enumerate_sector(4, 3, 1)
    ours = fr.full_spectrum(fr.build_hamiltonian(spec, basis))
    theirs = np.linalg.eigvalsh(DenseOracle(4, spec.amplitudes(), spec.V, spec.U)
                                .hamiltonian(2, 1))
    assert np.abs(ours - theirs).max() < 1e-10


def test_hardcore_spectra_against_oracle():
    spec = random_spec(9, L=5, N=4)
    spec = fr.make_spec(5, 4, spec.hop_mag, spec.hop_phase, spec.V, fr.INFINITY)
    basis = fr.enumerate_sector(5, 4, 0, hardcore=True)
    ours = fr.full_spectrum(fr.build_hamiltonian(spec, basis))
    oracle = DenseOracle(5, spec.amplitudes(), spec.V, None, hardcore=True)
    assert np.abs(ours - np.linalg.eigvalsh(oracle.hamiltonian(2, 2))).max() < 1e-10


def test_one_particle_fourier_levels():
    for L, phi in ((3, 0.0), (3, PI), (4, 0.7), (6, 2.3)):
        spec = fr.with_flux(fr.make_spec(L, 1), phi)
        got = np.linalg.eigvalsh(fr.build_one_particle(spec))
        assert np.abs(got - fourier_levels(L, phi)).max() < 1e-12
    assert np.abs(fourier_levels(3, 0.0) - [-1, -1, 2]).max() < 1e-12
    assert np.abs(fourier_levels(3, PI) - [-2, 1, 1]).max() < 1e-12


def test_basis_mismatch_rejected():
    spec = fr.make_spec(4, 2)
    with pytest.raises(BasisMismatch):
        fr.build_hamiltonian(spec, fr.enumerate_sector(4, 2, 0, hardcore=True))
    with pytest.raises(BasisMismatch):
        fr.build_hamiltonian(spec, fr.enumerate_sector(4, 3, 1))


def test_total_spin_n1_and_polarized():
    basis = fr.enumerate_sector(4, 1, 1)
    s2 = fr.build_total_spin(basis).to_dense()
    assert np.abs(s2 - 0.75 * np.eye(basis.dim)).max() < 1e-15

    pol = fr.enumerate_sector(4, 2, 2)
    vals = np.linalg.eigvalsh(fr.build_total_spin(pol).to_dense())
    assert np.abs(vals - 2.0).max() < 1e-12  # S = 1 throughout


def test_total_spin_content_l4_free_sector():
    basis = fr.enumerate_sector(4, 2, 0)
    vals = np.sort(np.linalg.eigvalsh(fr.build_total_spin(basis).to_dense()))
    # ten singlets and six Sz=0 triplet members
    assert np.abs(vals[:10]).max() < 1e-10
    assert np.abs(vals[10:] - 2.0).max() < 1e-10
    oracle = DenseOracle(4, [1.0] * 4, [0.0] * 4, [0.0] * 4)
    theirs = np.sort(np.linalg.eigvalsh(oracle.total_spin(1, 1)))
    assert np.abs(vals - theirs).max() < 1e-10


@pytest.mark.parametrize("seed,hardcore", [(1, False), (2, False), (3, True)])
def test_s2_commutes_with_hamiltonian(seed, hardcore):
    spec = random_spec(seed, L=5, N=3)
    if hardcore:
        spec = fr.make_spec(5, 3, spec.hop_mag, spec.hop_phase, spec.V, fr.INFINITY)
    basis = fr.enumerate_sector(5, 3, 1, hardcore=hardcore)
    h = fr.build_hamiltonian(spec, basis).to_dense()
    s2 = fr.build_total_spin(basis).to_dense()
    assert np.abs(s2 @ h - h @ s2).max() < 1e-12


def test_hermiticity_exact():
    for seed in range(5):
        spec = random_spec(seed)
        basis = fr.enumerate_sector(5, 3, 1)
        assert fr.build_hamiltonian(spec, basis).hermiticity_defect() == 0.0


def test_negative_envelope_fixed_point_and_modulus():
    m = sparse.csr_matrix(np.array([[1.0, -2.0], [-2.0, -3.0]], dtype=complex))
    h = SparseHermitian(m)
    assert np.abs(fr.negative_envelope(h).to_dense() - h.to_dense()).max() == 0.0

    m = sparse.csr_matrix(np.array([[0.0, 1j], [-1j, 0.0]]))
    env = fr.negative_envelope(SparseHermitian(m)).to_dense()
    assert np.abs(env - np.array([[0.0, -1.0], [-1.0, 0.0]])).max() < 1e-15


def test_envelope_gauge_equivalence_at_optimal_flux():
    # at the optimal flux the envelope is reachable by a diagonal sign gauge
    spec = fr.make_spec(4, 2, U=2.0)  # flux 0 = (N/2+1)pi mod 2pi
    basis = fr.enumerate_sector(4, 2, 0)
    h = fr.build_hamiltonian(spec, basis)
    env = fr.negative_envelope(h)
    g = fr.solve_sign_gauge(h, env)
    assert conjugation_residual(g, h, env) < 1e-10
    assert np.abs(fr.full_spectrum(h) - fr.full_spectrum(env)).max() < 1e-10

    # away from it the equivalence must break on some cycle
    h_pi = fr.build_hamiltonian(fr.with_flux(spec, PI), basis)
    with pytest.raises(FluxObstruction):
        fr.solve_sign_gauge(h_pi, fr.negative_envelope(h_pi))


def test_hardcore_zero_and_pi_gauge_equivalent():
    spec = fr.make_spec(4, 2, U=fr.INFINITY)
    basis = fr.enumerate_sector(4, 2, 0, hardcore=True)
    h0 = fr.build_hamiltonian(spec, basis)
    hpi = fr.build_hamiltonian(fr.with_flux(spec, PI), basis)
    g = fr.solve_sign_gauge(hpi, h0)
    assert conjugation_residual(g, hpi, h0) < 1e-10


def test_solve_sign_gauge_rejects_different_moduli():
    spec = fr.make_spec(4, 2, U=2.0)
    basis = fr.enumerate_sector(4, 2, 0)
    h = fr.build_hamiltonian(spec, basis)
    other = fr.build_hamiltonian(fr.make_spec(4, 2, (1.0, 1.0, 1.0, 1.7), U=2.0), basis)
    with pytest.raises(FluxObstruction):
        fr.solve_sign_gauge(h, other)


def test_hole_particle_down():
    spec = fr.make_spec(3, 3)
    assert fr.lowest_sum(spec, 2, 0.0) == pytest.approx(-2.0, abs=1e-12)
    assert fr.lowest_sum(spec, 1, PI) == pytest.approx(-2.0, abs=1e-12)
    flipped = fr.hole_particle_down(spec)
    assert flipped.flux == pytest.approx(fr.model.fold_angle(3 * PI), abs=1e-12)
    # spectrum negates and reflects
    a = np.linalg.eigvalsh(fr.build_one_particle(spec))
    b = np.linalg.eigvalsh(fr.build_one_particle(flipped))
    assert np.abs(a + b[::-1]).max() < 1e-12

    spec5 = fr.make_spec(5, 5)
    assert fr.lowest_sum(spec5, 3, PI / 2) == pytest.approx(
        fr.lowest_sum(spec5, 2, 3 * PI / 2), abs=1e-12)

    with pytest.raises(PotentialPresent):
        fr.hole_particle_down(fr.make_spec(3, 3, V=(0.0, 1.0, 0.0)))


def test_extend_ring():
    spec = fr.make_spec(3, 1)
    doubled = fr.extend_ring(spec)
    assert doubled.L == 6 and doubled.hop_mag == (1.0,) * 6
    assert doubled.flux == pytest.approx(0.0, abs=1e-12)

    assert filled_sum(3, 0.0, 1) + filled_sum(3, PI, 1) == pytest.approx(-3.0, abs=1e-12)
    assert fr.lowest_sum(doubled, 2, 0.0) == pytest.approx(-3.0, abs=1e-12)
    assert fr.lowest_sum(doubled, 2, PI) == pytest.approx(-2 * math.sqrt(3), abs=1e-12)
    assert filled_sum(3, PI / 2, 1) + filled_sum(3, 3 * PI / 2, 1) == pytest.approx(
        -2 * math.sqrt(3), abs=1e-12)

    with pytest.raises(InteractionPresent):
        fr.extend_ring(fr.make_spec(3, 2, U=1.0))
    with pytest.raises(InteractionPresent):
        fr.extend_ring(fr.make_spec(3, 2, U=fr.INFINITY))
    with pytest.raises(PotentialPresent):
        fr.extend_ring(fr.make_spec(3, 2, V=(1.0, 0.0, 0.0)))


def test_eigenvector_doubling():
    rng = np.random.default_rng(17)
    for phi in (0.0, 0.9, PI / 2):
        spec = fr.with_flux(fr.make_spec(5, 1, rng.uniform(0.5, 2, 5)), phi)
        h = fr.build_one_particle(spec)
        vals, vecs = np.linalg.eigh(h)
        # doubled ring in the gauge carrying the whole 2*phi on the first
        # seam bond; there the two-copy extension with phase e^{i phi} on
        # the second copy is an exact eigenvector
        phases = [0.0] * 10
        phases[4] = 2 * phi
        seam_gauge = fr.make_spec(10, 2, tuple(spec.hop_mag) * 2, phases)
        h2 = fr.build_one_particle(seam_gauge)
        for j in range(5):
            psi = vecs[:, j]
            ext = np.concatenate([psi, np.exp(1j * phi) * psi])
            assert np.linalg.norm(h2 @ ext - vals[j] * ext) < 1e-10
        # same spectrum as the periodic tiling (pure gauge freedom)
        tiled = fr.build_one_particle(fr.extend_ring(spec))
        assert np.abs(np.linalg.eigvalsh(h2) - np.linalg.eigvalsh(tiled)).max() < 1e-10


def test_one_particle_gauge_covariance_explicit():
    rng = np.random.default_rng(23)
    spec = fr.make_spec(5, 1, rng.uniform(0.5, 2, 5), rng.uniform(0, 2 * PI, 5),
                        rng.normal(0, 1, 5))
    moved = fr.canonical_gauge(spec)
    # g_x = exp(i sum_{y<x} (theta'_y - theta_y)) conjugates h into h'
    delta = np.asarray(moved.hop_phase) - np.asarray(spec.hop_phase)
    g = np.exp(1j * np.concatenate([[0.0], np.cumsum(delta[:-1])]))
    h = fr.build_one_particle(spec)
    h_moved = fr.build_one_particle(moved)
    assert np.abs(np.diag(g) @ h @ np.diag(g).conj().T - h_moved).max() < 1e-14


def test_perron_frobenius_positive_ground_vector_per_block():
    # sign-fixed gauge: non-positive off-diagonal entries, so each block's
    # lowest eigenvector can be chosen strictly positive
    spec = fr.make_spec(5, 2, hop_phase=(PI, PI, PI, PI, 0.0), U=fr.INFINITY)
    basis = fr.enumerate_sector(5, 2, 0, hardcore=True)
    h = fr.build_hamiltonian(spec, basis)
    dense = h.to_dense()
    off = dense[~np.eye(basis.dim, dtype=bool)]
    assert off.real.max() <= 0.0 and np.abs(off.imag).max() < 1e-12
    for block in fr.decompose_blocks(basis, spec):
        idx = np.asarray(block.member_indices)
        vals, vecs = np.linalg.eigh(dense[np.ix_(idx, idx)])
        v = vecs[:, 0]
        v = v * np.sign(v[np.argmax(np.abs(v))].real)
        assert v.real.min() > 0.0
        assert vals[0] < vals[1] - 1e-12  # PF: block ground is simple


def test_flux_family_matches_direct_build():
    spec = random_spec(4, L=5, N=3)
    basis = fr.enumerate_sector(5, 3, 1)
    family = fr.flux_family(spec, basis)
    for phi in (0.0, 1.1, PI):
        direct = fr.build_hamiltonian(fr.with_flux(spec, phi), basis).to_dense()
        assert np.abs(family.dense(phi) - direct).max() < 1e-14
        assert np.abs(family.hamiltonian(phi).to_dense() - direct).max() < 1e-14


def test_dump_coo_deterministic_and_one_indexed():
    spec = fr.make_spec(3, 2, U=1.0)
    basis = fr.enumerate_sector(3, 2, 0)
    a = dump_coo(fr.build_hamiltonian(spec, basis))
    b = dump_coo(fr.build_hamiltonian(spec, basis))
    assert a == b
    first = a.splitlines()[0].split()
    assert int(first[0]) >= 1 and int(first[1]) >= 1
    rows = [tuple(map(int, line.split()[:2])) for line in a.splitlines()]
    assert rows == sorted(rows)
