import itertools
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onticfock.errors import CapacityError, DimensionError
from onticfock.fock import (
    CompositeBasis,
    FockBasis,
    LinearOperator,
    ModeKind,
    StateVector,
    make_boson_mode,
    make_fermion_modes,
    tensor_compose,
)

# Independent Jordan-Wigner oracle: kron of 2x2 blocks, mode 0 fastest, so the
# leftmost kron factor is the highest mode.
Z = np.diag([1.0, -1.0])
LOWER = np.array([[0.0, 1.0], [0.0, 0.0]])


def jw_oracle(n_modes, j):
    factors = []
    for m in range(n_modes - 1, -1, -1):
        factors.append(LOWER if m == j else (Z if m < j else np.eye(2)))
    return reduce(np.kron, factors)


def anti(a, b):
    return a @ b + b @ a


# ----------------------------------------------------------------- bosons


def test_boson_mode_d2_single_entry():
    a, adag, n = make_boson_mode(2)
    dense = a.toarray()
    assert dense[0, 1] == 1.0
    assert np.count_nonzero(dense) == 1


def test_boson_mode_number_diag():
    a, adag, n = make_boson_mode(4)
    np.testing.assert_array_equal(n.toarray(), np.diag([0, 1, 2, 3]))
    np.testing.assert_array_equal(adag.toarray(), a.toarray().conj().T)
    for k in range(1, 4):
        assert a.toarray()[k - 1, k] == pytest.approx(np.sqrt(k), abs=1e-15)


def test_boson_commutator_top_level():
    a, adag, _ = make_boson_mode(4)
    np.testing.assert_allclose(a.commutator(adag).toarray(), np.diag([1, 1, 1, -3]), atol=1e-15)


@pytest.mark.parametrize("D", [1, 2, 3, 7])
def test_commutator_is_identity_minus_top_projector(D):
    a, adag, _ = make_boson_mode(D)
    expected = np.eye(D)
    expected[D - 1, D - 1] -= D
    assert a.commutator(adag).max_deviation(expected) < 1e-14


def test_boson_mode_rejects_zero():
    with pytest.raises(DimensionError):
        make_boson_mode(0)
    with pytest.raises(DimensionError):
        ModeKind(0, False)


def test_fermion_mode_kind_dim_two():
    assert ModeKind.fermion().dim == 2
    with pytest.raises(DimensionError):
        ModeKind(3, True)


# --------------------------------------------------------------- fermions


def test_single_fermion_mode():
    [(c, cdag)] = make_fermion_modes(1)
    np.testing.assert_array_equal(c.toarray(), [[0, 1], [0, 0]])
    np.testing.assert_array_equal(cdag.toarray(), [[0, 0], [1, 0]])


def test_two_modes_cross_anticommutator_exact():
    (c0, _), (_, cdag1) = make_fermion_modes(2)
    assert c0.anticommutator(cdag1).max_abs() == 0.0


@pytest.mark.parametrize("M", [1, 2, 3, 4])
def test_fermion_modes_match_oracle(M):
    ops = make_fermion_modes(M)
    for j, (c, cdag) in enumerate(ops):
        np.testing.assert_array_equal(c.toarray(), jw_oracle(M, j))
        np.testing.assert_array_equal(cdag.toarray(), jw_oracle(M, j).T)


def test_car_brute_force_m3():
    ops = make_fermion_modes(3)
    eye = np.eye(8)
    for (i, (ci, cdi)), (j, (cj, cdj)) in itertools.product(enumerate(ops), repeat=2):
        assert ci.anticommutator(cdj).max_deviation(eye * (i == j)) <= 1e-14
        assert ci.anticommutator(cj).max_abs() <= 1e-14
        assert cdi.anticommutator(cdj).max_abs() <= 1e-14


def test_fermion_cap_error_names_cap():
    with pytest.raises(CapacityError, match="14"):
        make_fermion_modes(15)
    with pytest.raises(CapacityError) as info:
        FockBasis.fermionic(5, cap=4)
    assert info.value.cap == 4


def test_fermion_modes_need_one():
    with pytest.raises((DimensionError, ValueError)):
        make_fermion_modes(0)


# ----------------------------------------------------------- composition


def test_two_bosons_commute():
    comp = tensor_compose([FockBasis.bosonic([2]), FockBasis.bosonic([2])])
    assert comp.basis.dim == 4
    a0 = comp.lift(0, make_boson_mode(2)[0])
    adag1 = comp.lift(1, make_boson_mode(2)[1])
    assert a0.commutator(adag1).max_abs() == 0.0


def test_boson_fermion_index_roundtrip():
    comp = tensor_compose([FockBasis.bosonic([3]), FockBasis.fermionic(1)])
    assert comp.basis.dim == 6
    for i in range(6):
        assert comp.basis.index(comp.basis.occupation(i)) == i


def test_two_fermion_parts_lifted_car():
    comp = tensor_compose([FockBasis.fermionic(1), FockBasis.fermionic(1)])
    c0 = comp.lift(0, FockBasis.fermionic(1).lowering(0))
    c1 = comp.lift(1, FockBasis.fermionic(1).lowering(0))
    assert c0.anticommutator(c0.adjoint()).max_deviation(np.eye(4)) == 0.0
    assert c0.anticommutator(c1).max_abs() == 0.0
    assert c0.anticommutator(c1.adjoint()).max_abs() == 0.0
    # same operators as building the two-mode basis directly
    direct = FockBasis.fermionic(2)
    np.testing.assert_array_equal(c1.toarray(), direct.lowering(1).toarray())


def test_mixed_composite_boson_commutes_with_fermion():
    parts = [FockBasis.fermionic(2), FockBasis.bosonic([3]), FockBasis.fermionic(1)]
    comp = tensor_compose(parts)
    a = comp.lift(1, make_boson_mode(3)[0])
    fermis = [comp.lift(0, parts[0].lowering(0)), comp.lift(0, parts[0].lowering(1)),
              comp.lift(2, parts[2].lowering(0))]
    for f in fermis:
        assert a.commutator(f).max_abs() == 0.0
        assert a.commutator(f.adjoint()).max_abs() == 0.0
    for x, y in itertools.combinations(fermis, 2):
        assert x.anticommutator(y).max_abs() == 0.0
        assert x.anticommutator(y.adjoint()).max_abs() == 0.0


def test_lift_preserves_adjoint():
    parts = [FockBasis.bosonic([2, 3]), FockBasis.fermionic(2)]
    comp = tensor_compose(parts)
    op = parts[0].lowering(1)
    assert comp.lift(0, op.adjoint()).max_deviation(comp.lift(0, op).adjoint()) == 0.0


def test_compose_cap_reports_attempted():
    with pytest.raises(CapacityError) as info:
        tensor_compose([FockBasis.bosonic([8])] * 4, cap=1000)
    assert info.value.attempted == 8**4


def test_basis_cap():
    with pytest.raises(CapacityError):
        FockBasis.bosonic([2] * 21)


# -------------------------------------------------------------- algebra


def test_operator_immutable():
    op = make_boson_mode(3)[0]
    with pytest.raises(AttributeError):
        op.matrix = None
    st_ = FockBasis.bosonic([3]).basis_state([1])
    with pytest.raises(AttributeError):
        st_.amplitudes = None
    with pytest.raises(ValueError):
        st_.amplitudes[0] = 1.0


def test_state_vector_basics():
    basis = FockBasis.bosonic([3])
    s = basis.basis_state([2])
    assert s.norm() == 1.0
    assert s.amplitude([2]) == 1.0
    a, adag, n = make_boson_mode(3)
    assert s.expectation(n) == pytest.approx(2.0)
    assert (a @ s).distance(basis.basis_state([1]) * np.sqrt(2)) < 1e-15


def test_pruning_drops_tiny_entries():
    basis = FockBasis.bosonic([2])
    op = LinearOperator.from_dense(basis, [[1.0, 1e-17], [0.0, 1.0]])
    assert op.nnz == 2


def test_basis_mismatch_rejected():
    a = make_boson_mode(3)[0]
    b = make_boson_mode(4)[0]
    with pytest.raises(Exception):
        a @ b


def _random_op(rng, basis):
    d = basis.dim
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m[rng.random((d, d)) < 0.5] = 0
    return LinearOperator.from_dense(basis, m)


dims_strategy = st.lists(st.integers(1, 4), min_size=1, max_size=4)


@settings(max_examples=40, deadline=None)
@given(dims_strategy)
def test_index_bijection(dims):
    basis = FockBasis.bosonic(dims)
    assert basis.dim == int(np.prod(dims))
    seen = set()
    for i in range(basis.dim):
        occ = basis.occupation(i)
        assert all(0 <= n < d for n, d in zip(occ, dims))
        assert basis.index(occ) == i
        seen.add(occ)
    assert len(seen) == basis.dim
    # mode 0 fastest
    if basis.dim > 1 and dims[0] > 1:
        assert basis.occupation(1)[0] == 1


@settings(max_examples=30, deadline=None)
@given(dims_strategy, st.integers(0, 2**32 - 1))
def test_adjoint_properties(dims, seed):
    rng = np.random.default_rng(seed)
    basis = FockBasis.bosonic(dims)
    x, y = _random_op(rng, basis), _random_op(rng, basis)
    assert x.adjoint().adjoint().max_deviation(x) == 0.0
    assert (x @ y).adjoint().max_deviation(y.adjoint() @ x.adjoint()) <= 1e-13 * basis.dim


@settings(max_examples=25, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=4), st.integers(2, 3))
def test_mixed_basis_car_and_ccr(kinds, D):
    modes = [ModeKind.fermion() if f else ModeKind.bosonic(D) for f in kinds]
    basis = FockBasis(modes)
    lowers = [basis.lowering(m) for m in range(len(modes))]
    for i, j in itertools.combinations(range(len(modes)), 2):
        x, y = lowers[i], lowers[j]
        if kinds[i] and kinds[j]:
            assert x.anticommutator(y).max_abs() <= 1e-14
            assert x.anticommutator(y.adjoint()).max_abs() <= 1e-14
        else:
            assert x.commutator(y).max_abs() <= 1e-14
            assert x.commutator(y.adjoint()).max_abs() <= 1e-14
    for i, f in enumerate(kinds):
        x = lowers[i]
        if f:
            assert x.anticommutator(x.adjoint()).max_deviation(basis.identity()) <= 1e-14


def test_state_inner_is_conjugate_linear_in_bra():
    basis = FockBasis.bosonic([2])
    s = StateVector(basis, [1j, 0])
    t = StateVector(basis, [1, 0])
    assert s.inner(t) == pytest.approx(-1j)


def test_composite_offsets_and_global_mode():
    comp = CompositeBasis([FockBasis.bosonic([2, 2]), FockBasis.fermionic(3)])
    assert comp.global_mode(1, 2) == 4
    assert comp.basis.n_modes == 5
