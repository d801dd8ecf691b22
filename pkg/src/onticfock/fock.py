"""Truncated Fock spaces: modes, mixed-radix bases, sparse operators, states.

Occupation tuples are indexed mixed-radix with mode 0 varying fastest.
Fermionic lowering operators carry Jordan-Wigner strings over the occupied
fermionic modes of *lower* index in the basis order.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from . import _accel
from .errors import BasisMismatchError, CapacityError, DimensionError, OnticError

DIM_CAP = 2**20
FERMION_MODE_CAP = 14
PRUNE_BELOW = 1e-15


@dataclass(frozen=True)
class ModeKind:
    """One mode: bosonic with truncation ``dim`` or fermionic (``dim == 2``)."""

    dim: int
    is_fermionic: bool = False

    def __post_init__(self):
        if self.is_fermionic and self.dim != 2:
            raise DimensionError("fermionic mode must have dimension 2")
        if int(self.dim) != self.dim or self.dim < 1:
            raise DimensionError(f"mode dimension must be >= 1, got {self.dim}")

    @classmethod
    def bosonic(cls, dim: int) -> "ModeKind":
        return cls(int(dim), False)

    @classmethod
    def fermion(cls) -> "ModeKind":
        return cls(2, True)


class FockBasis:
    """Ordered tuple of modes with an occupation <-> index bijection."""

    def __init__(self, modes: Sequence[ModeKind], cap: int = DIM_CAP):
        modes = tuple(modes)
        if not modes:
            raise DimensionError("a basis needs at least one mode")
        dims = np.array([m.dim for m in modes], dtype=np.int64)
        dim = 1
        for d in dims:
            dim *= int(d)
        if dim > cap:
            raise CapacityError(
                f"basis dimension {dim} exceeds cap {cap}", attempted=dim, cap=cap
            )
        self._modes = modes
        self._dims = dims
        self._dims.setflags(write=False)
        self._fermionic = np.array([m.is_fermionic for m in modes], dtype=np.bool_)
        self._fermionic.setflags(write=False)
        self._strides = _accel.strides_for(dims)
        self._strides.setflags(write=False)
        self._dim = dim

    @classmethod
    def bosonic(cls, dims: Sequence[int], cap: int = DIM_CAP) -> "FockBasis":
        return cls([ModeKind.bosonic(d) for d in dims], cap=cap)

    @classmethod
    def fermionic(cls, n_modes: int, cap: int = FERMION_MODE_CAP) -> "FockBasis":
        if n_modes < 1:
            raise DimensionError("need at least one fermionic mode")
        if n_modes > cap:
            raise CapacityError(
                f"{n_modes} fermionic modes exceeds the cap of {cap}",
                attempted=n_modes,
                cap=cap,
            )
        return cls([ModeKind.fermion()] * n_modes)

    modes = property(lambda self: self._modes)
    dims = property(lambda self: self._dims)
    strides = property(lambda self: self._strides)
    fermionic_mask = property(lambda self: self._fermionic)
    dim = property(lambda self: self._dim)
    n_modes = property(lambda self: len(self._modes))

    def __len__(self):
        return self._dim

    def __eq__(self, other):
        return isinstance(other, FockBasis) and self._modes == other._modes

    def __hash__(self):
        return hash(self._modes)

    def __repr__(self):
        kinds = ",".join("F" if m.is_fermionic else f"B{m.dim}" for m in self._modes)
        return f"FockBasis([{kinds}], dim={self._dim})"

    def index(self, occupation: Sequence[int]) -> int:
        occ = np.asarray(occupation, dtype=np.int64)
        if occ.shape != self._dims.shape or np.any(occ < 0) or np.any(occ >= self._dims):
            raise DimensionError(f"occupation {tuple(occupation)} not in {self!r}")
        return int(occ @ self._strides)

    def occupation(self, index: int) -> tuple:
        if not 0 <= index < self._dim:
            raise DimensionError(f"index {index} out of range for {self!r}")
        return tuple(int(n) for n in self.occupations[index])

    @cached_property
    def occupations(self) -> np.ndarray:
        table = _accel.occupations(self._dims)
        table.setflags(write=False)
        return table

    @cached_property
    def fermion_parity(self) -> np.ndarray:
        """+1/-1 per basis index from the total fermionic occupation."""
        n = self.occupations[:, self._fermionic].sum(axis=1)
        out = np.where(n % 2 == 0, 1.0, -1.0)
        out.setflags(write=False)
        return out

    def identity(self) -> "LinearOperator":
        return LinearOperator(self, sp.identity(self._dim, dtype=np.complex128, format="csr"))

    def lowering(self, mode: int) -> "LinearOperator":
        """Annihilation operator of ``mode`` on the full basis."""
        if not 0 <= mode < self.n_modes:
            raise IndexError(f"mode {mode} out of range 0..{self.n_modes - 1}")
        rows, cols, vals = _accel.lowering_coo(self._dims, self._fermionic, mode)
        mat = sp.csr_matrix(
            (vals.astype(np.complex128), (rows, cols)), shape=(self._dim, self._dim)
        )
        return LinearOperator(self, mat)

    def raising(self, mode: int) -> "LinearOperator":
        return self.lowering(mode).adjoint()

    def number(self, mode: int) -> "LinearOperator":
        n = self.occupations[:, mode].astype(np.complex128)
        return LinearOperator(self, sp.diags(n, format="csr"))

    def basis_state(self, occupation: Sequence[int]) -> "StateVector":
        amps = np.zeros(self._dim, dtype=np.complex128)
        amps[self.index(occupation)] = 1.0
        return StateVector(self, amps)

    def zero_state(self) -> "StateVector":
        return StateVector(self, np.zeros(self._dim, dtype=np.complex128))


def _prune(mat):
    mat = sp.csr_matrix(mat, dtype=np.complex128)
    if mat.nnz:
        mat.data[np.abs(mat.data) < PRUNE_BELOW] = 0.0
        mat.eliminate_zeros()
    return mat


def _same_basis(a, b):
    if a.basis != b.basis:
        raise BasisMismatchError(f"{a.basis!r} vs {b.basis!r}")


class LinearOperator:
    """Sparse complex matrix bound to a :class:`FockBasis`."""

    __slots__ = ("basis", "matrix")

    def __init__(self, basis: FockBasis, matrix):
        mat = _prune(matrix)
        if mat.shape != (basis.dim, basis.dim):
            raise DimensionError(f"matrix shape {mat.shape} does not match {basis!r}")
        mat.data.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "matrix", mat)

    def __setattr__(self, name, value):
        raise AttributeError("LinearOperator is immutable")

    @classmethod
    def from_dense(cls, basis: FockBasis, array) -> "LinearOperator":
        return cls(basis, sp.csr_matrix(np.asarray(array, dtype=np.complex128)))

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def nnz(self):
        return self.matrix.nnz

    def adjoint(self) -> "LinearOperator":
        return LinearOperator(self.basis, self.matrix.conj().T)

    H = property(adjoint)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def max_abs(self) -> float:
        return float(np.abs(self.matrix.data).max()) if self.matrix.nnz else 0.0

    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.matrix.data) ** 2)))

    def max_deviation(self, other) -> float:
        """Largest entrywise ``|self - other|``; ``other`` may be an operator or dense array."""
        if isinstance(other, LinearOperator):
            _same_basis(self, other)
            diff = self.matrix - other.matrix
        else:
            diff = self.matrix - sp.csr_matrix(np.asarray(other, dtype=np.complex128))
        diff = sp.csr_matrix(diff)
        return float(np.abs(diff.data).max()) if diff.nnz else 0.0

    def __matmul__(self, other):
        if isinstance(other, LinearOperator):
            _same_basis(self, other)
            return LinearOperator(self.basis, self.matrix @ other.matrix)
        if isinstance(other, StateVector):
            _same_basis(self, other)
            return StateVector(self.basis, self.matrix @ other.amplitudes)
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, LinearOperator):
            return NotImplemented
        _same_basis(self, other)
        return LinearOperator(self.basis, self.matrix + other.matrix)

    def __sub__(self, other):
        if not isinstance(other, LinearOperator):
            return NotImplemented
        _same_basis(self, other)
        return LinearOperator(self.basis, self.matrix - other.matrix)

    def __mul__(self, scalar):
        if isinstance(scalar, (LinearOperator, StateVector)):
            return NotImplemented
        return LinearOperator(self.basis, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def power(self, k: int) -> "LinearOperator":
        out = self.basis.identity()
        for _ in range(k):
            out = out @ self
        return out

    def commutator(self, other: "LinearOperator") -> "LinearOperator":
        return self @ other - other @ self

    def anticommutator(self, other: "LinearOperator") -> "LinearOperator":
        return self @ other + other @ self

    def __repr__(self):
        return f"LinearOperator({self.basis!r}, nnz={self.nnz})"


class StateVector:
    """Complex amplitude vector bound to a :class:`FockBasis`."""

    __slots__ = ("basis", "amplitudes")

    def __init__(self, basis: FockBasis, amplitudes):
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape != (basis.dim,):
            raise DimensionError(f"{amps.shape[0]} amplitudes for {basis!r}")
        if not np.all(np.isfinite(amps)):
            raise OnticError("state amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise OnticError("cannot normalize the zero vector")
        return StateVector(self.basis, self.amplitudes / n)

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        _same_basis(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def distance(self, other: "StateVector") -> float:
        _same_basis(self, other)
        return float(np.linalg.norm(self.amplitudes - other.amplitudes))

    def amplitude(self, occupation) -> complex:
        return complex(self.amplitudes[self.basis.index(occupation)])

    def expectation(self, op: LinearOperator) -> complex:
        return self.inner(op @ self)

    def __add__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        _same_basis(self, other)
        return StateVector(self.basis, self.amplitudes + other.amplitudes)

    def __sub__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        _same_basis(self, other)
        return StateVector(self.basis, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar):
        return StateVector(self.basis, self.amplitudes * complex(scalar))

    __rmul__ = __mul__

    def __repr__(self):
        return f"StateVector({self.basis!r}, norm={self.norm():.6g})"


def make_boson_mode(dim: int):
    """Return ``(A, Adag, N)`` for one bosonic mode truncated at ``dim`` levels."""
    if int(dim) != dim or dim < 1:
        raise DimensionError(f"boson truncation must be >= 1, got {dim}")
    basis = FockBasis.bosonic([dim])
    a = basis.lowering(0)
    return a, a.adjoint(), basis.number(0)


def make_fermion_modes(n_modes: int, cap: int = FERMION_MODE_CAP):
    """Jordan-Wigner fermion operators ``[(C_i, Cdag_i), ...]`` on ``2**n_modes`` states."""
    basis = FockBasis.fermionic(n_modes, cap=cap)
    pairs = []
    for i in range(n_modes):
        c = basis.lowering(i)
        pairs.append((c, c.adjoint()))
    return pairs


class CompositeBasis:
    """Tensor product of part bases with lifting of per-part operators.

    The composite mode order is the concatenation of the parts' modes, so part
    0 varies fastest.  Lifting a fermion-odd operator inserts the parity string
    of every earlier part, which reproduces the global Jordan-Wigner order.
    """

    def __init__(self, parts: Sequence[FockBasis], cap: int = DIM_CAP):
        self.parts = tuple(parts)
        if not self.parts:
            raise DimensionError("need at least one part")
        modes = [m for p in self.parts for m in p.modes]
        dim = 1
        for p in self.parts:
            dim *= p.dim
        if dim > cap:
            raise CapacityError(
                f"composite dimension {dim} exceeds cap {cap}", attempted=dim, cap=cap
            )
        self.basis = FockBasis(modes, cap=cap)
        offsets = np.cumsum([0] + [p.n_modes for p in self.parts])
        self.mode_offsets = tuple(int(o) for o in offsets[:-1])

    def global_mode(self, part: int, mode: int) -> int:
        return self.mode_offsets[part] + mode

    @staticmethod
    def fermion_grading(op: LinearOperator) -> int:
        """0 if ``op`` preserves fermion parity, 1 if it flips it."""
        coo = op.matrix.tocoo()
        if coo.nnz == 0:
            return 0
        par = op.basis.fermion_parity
        flips = par[coo.row] != par[coo.col]
        if flips.all():
            return 1
        if not flips.any():
            return 0
        raise OnticError("operator mixes fermion-even and fermion-odd parts")

    def lift(self, part: int, op: LinearOperator) -> LinearOperator:
        if op.basis != self.parts[part]:
            raise BasisMismatchError(f"operator basis {op.basis!r} is not part {part}")
        before = 1
        for p in self.parts[:part]:
            before *= p.dim
        after = self.basis.dim // (before * op.basis.dim)
        if self.fermion_grading(op) and part > 0:
            signs = np.ones(1)
            for p in self.parts[:part]:
                signs = np.kron(p.fermion_parity, signs)
            low = sp.diags(signs.astype(np.complex128), format="csr")
        else:
            low = sp.identity(before, dtype=np.complex128, format="csr")
        mat = sp.kron(sp.kron(sp.identity(after, format="csr"), op.matrix), low)
        return LinearOperator(self.basis, mat)


def tensor_compose(parts: Sequence[FockBasis], cap: int = DIM_CAP) -> CompositeBasis:
    """Compose part bases into one composite basis; see :class:`CompositeBasis`."""
    return CompositeBasis(parts, cap=cap)
