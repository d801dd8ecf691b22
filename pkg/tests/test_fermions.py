import itertools
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from onticfock import fermions
from onticfock.errors import CommensurabilityError, DimensionError, LabelShapeError
from onticfock.fermions import Direction, FermionBlock, FermionGeometry


def geom(K, delta_r=1.0, c=1.0):
    return FermionGeometry((Direction(math.pi / 4, 0.3),), K, delta_r, c)


def block(K, s=1, **kw):
    return FermionBlock(geom(K, **kw), 0, s)


def hamiltonian_oracle(b):
    """Dense two-band H with vacuum shift, built from scratch."""
    g = b.geom
    H = np.zeros((b.basis.dim, b.basis.dim), dtype=complex)
    for n, k in enumerate(g.momenta):
        n1 = b.a1(n).adjoint() @ b.a1(n)
        n2 = b.a2(n).adjoint() @ b.a2(n)
        H += g.c * k * (n1.toarray() + n2.toarray() - np.eye(b.basis.dim))
    return H


# ------------------------------------------------------------------ geometry


def test_geometry_grid():
    g = geom(3, delta_r=0.5)
    assert g.n_sites == 6
    assert g.ring_length == pytest.approx(3.0)
    np.testing.assert_allclose(g.momenta, 2 * math.pi / 3.0 * (np.arange(3) + 0.5))
    np.testing.assert_allclose(g.sites, np.arange(6) * 0.5 - 1.5)
    assert np.all(g.momenta > 0)


def test_direction_constraints():
    d = Direction(math.pi / 3, 1.0)
    assert np.linalg.norm(d.vector) == pytest.approx(1.0)
    assert d.vector[2] >= 0
    with pytest.raises(ValueError):
        Direction(2.0)


def test_geometry_errors():
    with pytest.raises(DimensionError):
        FermionGeometry((), 0)
    with pytest.raises(ValueError):
        FermionGeometry((), 1, delta_r=0)


def test_beta_factor():
    d = Direction(math.pi / 6, 0.0, 0.2, 0.3)
    assert fermions.beta_factor(d, 0.5) == pytest.approx(0.5 * 0.2 * 0.3 * 0.5)


@pytest.mark.parametrize("K", range(1, 7))
@pytest.mark.parametrize("s", [1, -1])
def test_transform_unitary(K, s):
    w = fermions.site_transform(geom(K), s)
    n = 2 * K
    assert np.abs(w @ w.conj().T - np.eye(n)).max() < 1e-13
    assert np.abs(w.conj().T @ w - np.eye(n)).max() < 1e-13


def test_transform_entries_follow_definition():
    g = geom(2)
    w = fermions.site_transform(g, -1)
    j, n = 3, 1
    r, k = g.sites[j], g.momenta[n]
    assert w[j, 2 * n] == pytest.approx(np.exp(+1j * k * r) / 2)
    assert w[j, 2 * n + 1] == pytest.approx(np.exp(-1j * k * r) / 2)


# ----------------------------------------------------------- site operators


def test_k1_cross_anticommutator():
    ops = fermions.ontic_site_operators(geom(1))
    assert ops[0][0].anticommutator(ops[1][1]).max_abs() < 1e-14


@pytest.mark.parametrize("K", [1, 2, 3])
@pytest.mark.parametrize("s", [1, -1])
def test_car_table(K, s):
    b = block(K, s)
    ops = b.site_operators()
    eye = b.basis.identity()
    for (i, (pi, pid)), (j, (pj, pjd)) in itertools.product(enumerate(ops), repeat=2):
        assert pi.anticommutator(pjd).max_deviation(eye * (i == j)) < 1e-13
        assert pi.anticommutator(pj).max_abs() < 1e-13


@pytest.mark.parametrize("K", [1, 2, 3])
def test_number_sum_identity(K):
    b = block(K)
    total = None
    for psi, psid in b.site_operators():
        total = psid @ psi if total is None else total + psid @ psi
    assert total.max_deviation(b.two_band_number_sum()) < 1e-12


def test_site_operator_explicit_k1():
    b = block(1)
    g = b.geom
    w = fermions.site_transform(g, 1)
    psi0 = w[0, 0] * b.a1(0).toarray() + w[0, 1] * b.a2(0).adjoint().toarray()
    assert np.abs(b.site_operators()[0][0].toarray() - psi0).max() == 0.0


# -------------------------------------------------------------------- sea


def test_sea_k1():
    b = block(1)
    sea = b.sea_state()
    assert sea.amplitude([0, 1]) == pytest.approx(1.0)
    assert sea.norm() == pytest.approx(1.0)


def test_sea_k2_single_amplitude():
    sea = block(2).sea_state()
    nz = np.flatnonzero(np.abs(sea.amplitudes) > 0)
    assert len(nz) == 1
    assert block(2).basis.occupation(nz[0]) == (0, 1, 0, 1)


@pytest.mark.parametrize("K", [1, 2, 3])
def test_sea_mode_action(K):
    b = block(K)
    sea = b.sea_state()
    for n in range(K):
        assert (b.a1(n) @ sea).norm() == 0.0
        assert (b.a2(n) @ sea).norm() == pytest.approx(1.0)


@pytest.mark.parametrize("K", [1, 2, 3])
@pytest.mark.parametrize("s", [1, -1])
def test_sea_is_psi_vacuum(K, s):
    """Every Psi_j annihilates the sea, so <Psi^dag Psi> vanishes there.

    Half filling shows up on the empty Fock vacuum instead.
    """
    b = block(K, s)
    sea, bare = b.sea_state(), b.bare_vacuum()
    for psi, psid in b.site_operators():
        assert (psi @ sea).norm() < 1e-13
        assert abs(sea.expectation(psid @ psi)) < 1e-13
        assert bare.expectation(psid @ psi).real == pytest.approx(0.5, abs=1e-13)


# ----------------------------------------------------------- ontic states


def test_all_zero_label_is_vacuum():
    b = block(2)
    s = b.ontic_state([0, 0, 0, 0])
    for psi, _ in b.site_operators():
        assert (psi @ s).norm() < 1e-13
    assert s.distance(b.sea_state()) == 0.0


def test_k1_label_10():
    b = block(1)
    s = b.ontic_state([1, 0])
    assert s.expectation(b.n_op(0)).real == pytest.approx(1.0, abs=1e-13)
    assert abs(s.expectation(b.n_op(1))) < 1e-13
    assert s.distance(b.site_operators()[0][1] @ b.sea_state()) == 0.0


def test_label_errors():
    b = block(1)
    with pytest.raises(LabelShapeError):
        b.ontic_state([1, 0, 0])
    with pytest.raises(LabelShapeError):
        b.ontic_state([2, 0])
    with pytest.raises(IndexError):
        b.n_op(2)


@pytest.mark.parametrize("K", [1, 2, 3, 4])
def test_ontic_basis(K):
    b = block(K, -1 if K % 2 else 1)
    labels, mat = b.ontic_basis()
    n = mat.shape[1]
    assert n == 4**K
    assert np.abs(mat.conj().T @ mat - np.eye(n)).max() < 1e-12
    assert np.abs(mat @ mat.conj().T - np.eye(n)).max() < 1e-12
    for j in range(2 * K):
        nop = b.n_op(j).matrix
        resid = nop @ mat - mat * labels[:, j][None, :]
        assert np.abs(resid).max() < 1e-12


def test_k2_gram_16():
    _, mat = block(2).ontic_basis()
    assert np.abs(mat.conj().T @ mat - np.eye(16)).max() < 1e-12


def test_n_op_algebra_k2():
    b = block(2)
    ops = [b.n_op(j) for j in range(4)]
    for op in ops:
        assert (op @ op).max_deviation(op) < 1e-13
        assert op.max_deviation(op.adjoint()) < 1e-13
    for x, y in itertools.combinations(ops, 2):
        assert x.commutator(y).max_abs() < 1e-13


def test_n_op_module_wrapper():
    g = geom(1)
    s = fermions.ontic_state_fermion(g, 0, 1, [1, 0])
    assert (fermions.n_op_beable(g, 0, 1, 0) @ s).distance(s) < 1e-13
    assert fermions.sea_state(g).distance(block(1).sea_state()) == 0.0


# --------------------------------------------------------------- evolution


def test_zero_time_identity():
    b = block(2)
    ev = b.evolve(0.0)
    assert ev.operator.max_deviation(np.eye(16)) < 1e-15
    target, phase, wraps = ev.predict((1, 0, 1, 0))
    assert target == (1, 0, 1, 0) and phase == 1 and wraps == 0


@pytest.mark.parametrize("s,expected", [(1, (0, 1, 0, 0)), (-1, (0, 0, 0, 1))])
def test_one_step_k2(s, expected):
    b = block(2, s)
    t = b.geom.time_step
    U = scipy.linalg.expm(1j * t * hamiltonian_oracle(b))
    ev = b.evolve(t)
    assert np.abs(ev.operator.toarray() - U).max() < 1e-13
    out = U @ b.ontic_state((1, 0, 0, 0)).amplitudes
    assert abs(np.vdot(b.ontic_state(expected).amplitudes, out)) == pytest.approx(1.0, abs=1e-11)
    assert ev.predict((1, 0, 0, 0))[0] == expected


def test_commensurability_error_names_step():
    b = block(2, delta_r=0.5, c=2.0)
    with pytest.raises(CommensurabilityError, match="0.25"):
        b.evolve(0.1)
    ev = b.evolve(0.1, exact=False)
    assert ev.site_shift is None
    with pytest.raises(CommensurabilityError):
        ev.predict((0, 0, 0, 0))


@pytest.mark.parametrize("K", [1, 2, 3])
@pytest.mark.parametrize("s", [1, -1])
def test_permutation_with_predicted_signs(K, s):
    b = block(K, s)
    labels, mat = b.ontic_basis()
    H = hamiltonian_oracle(b)
    for m in range(-2 * K, 2 * K + 1):
        t = m * b.geom.time_step
        ev = b.evolve(t)
        assert ev.site_shift == s * m
        U = scipy.linalg.expm(1j * t * H)
        ov = mat.conj().T @ U @ mat
        for col, lab in enumerate(labels):
            target, phase, _ = ev.predict(lab)
            row = b.basis.index(target)
            assert abs(ov[row, col]) == pytest.approx(1.0, abs=1e-11)
            assert abs(ov[row, col] - phase) < 1e-11
            assert np.delete(np.abs(ov[:, col]), row).max() < 1e-11


def test_wrap_sign_examples():
    # one particle across the boundary: antiperiodic sign
    assert fermions.shifted_label((0, 0, 0, 1), 1) == ((1, 0, 0, 0), -1, 1)
    # the wrapped particle also passes the other one in the ordering: signs cancel
    assert fermions.shifted_label((1, 0, 0, 1), 1) == ((1, 1, 0, 0), 1, 1)
    # full revolution of two particles
    new, sign, wraps = fermions.shifted_label((1, 1, 0, 0), 4)
    assert new == (1, 1, 0, 0) and sign == 1 and wraps == 2


def test_vacuum_shift_controls_global_phase():
    b = block(2)
    t = 2 * b.geom.time_step
    assert b.evolve(t).global_phase == pytest.approx(1.0)
    ev = b.evolve(t, vacuum_shift=False)
    expected = np.exp(1j * t * b.geom.c * b.geom.momenta.sum())
    assert ev.global_phase == pytest.approx(expected)
    _, mat = b.ontic_basis()
    ov = mat.conj().T @ ev.operator.toarray() @ mat
    lab = (1, 0, 1, 0)
    target, phase, _ = ev.predict(lab)
    assert ov[b.basis.index(target), b.basis.index(lab)] == pytest.approx(phase, abs=1e-11)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=6, max_size=6), st.integers(-12, 12))
def test_shifted_label_composes(label, shift):
    a, sa, _ = fermions.shifted_label(label, shift)
    b, sb, _ = fermions.shifted_label(a, -shift)
    assert b == tuple(label)
    assert sa * sb == 1
    assert sum(a) == sum(label)


# ------------------------------------------------------------ bosonic demo


def test_bosonic_dirac_failure():
    rep = fermions.bosonic_dirac_failure_demo()
    bos, fer = rep["bosonic"], rep["fermionic_control"]
    assert bos["car_deviation"] > 0.5
    assert bos["pair_anticommutator"] > 0.1
    assert bos["gram_offdiag"] > 0.1
    assert fer["car_deviation"] < 1e-13
    assert fer["pair_anticommutator"] < 1e-13
    assert fer["gram_offdiag"] < 1e-12
