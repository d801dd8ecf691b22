"""Multimode bosonic theories: real/complex scalars and massive vectors.

A theory has ``F`` families (1 real scalar, 2 complex scalar, 3 real vector,
6 complex vector) of bosonic modes over a momentum lattice of ``M`` points.
Composite mode ``f * M + i`` is family ``f`` at lattice point ``i``; families
and points are 0-based.  Every operator uses unit-normalized ``[A, A^dag] = 1``
(up to truncation); the continuum conversion factor is reported by
:func:`alpha_factor` and never multiplied in.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from . import _accel
from .cogwheel import TWO_PI, PhaseLabel, beable_cyclic, beable_sg, mode_basis
from .errors import BasisMismatchError, CapacityError, DimensionError, LabelShapeError
from .fock import DIM_CAP, LinearOperator, StateVector, tensor_compose

FAMILY_COUNTS = {"scalar-real": 1, "scalar-complex": 2, "vector-real": 3, "vector-complex": 6}
GRAM_CAP = 4096


def dispersion(k, c: float = 1.0, mu: float = 1.0):
    """``c * sqrt(|k|^2 + mu^2)`` for one 3-vector or an ``(n, 3)`` array."""
    k = np.asarray(k, dtype=np.float64)
    return c * np.sqrt(np.sum(k * k, axis=-1) + mu * mu)


def alpha_factor(k, dk: float, c: float, mu: float) -> float:
    """Continuum-to-unit normalization factor of one momentum mode."""
    if c <= 0:
        raise ValueError("c must be positive")
    k = np.asarray(k, dtype=np.float64)
    root = math.sqrt(float(k @ k) + mu * mu)
    if root == 0.0:
        raise ZeroDivisionError("alpha is singular for the massless zero mode (k = 0, mu = 0)")
    return dk**1.5 / ((TWO_PI) ** 1.5 * math.sqrt(c * root))


@dataclass(frozen=True)
class MomentumLattice:
    delta_k: float
    points: tuple

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        if len({tuple(p) for p in pts}) != len(pts):
            raise ValueError("momentum lattice points must be distinct")
        object.__setattr__(self, "points", tuple(tuple(float(x) for x in p) for p in pts))

    @classmethod
    def from_integer_points(cls, ints, delta_k: float) -> "MomentumLattice":
        ints = np.asarray(ints, dtype=np.float64).reshape(-1, 3)
        return cls(delta_k, tuple(map(tuple, ints * delta_k)))

    @classmethod
    def line(cls, n_points: int, delta_k: float = 1.0) -> "MomentumLattice":
        """Points ``(i * delta_k, 0, 0)`` for ``i = 0 .. n_points - 1``."""
        ints = [(i, 0, 0) for i in range(n_points)]
        return cls.from_integer_points(ints, delta_k)

    def __len__(self):
        return len(self.points)

    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.float64)

    def omegas(self, c: float, mu: float) -> np.ndarray:
        return dispersion(self.array(), c, mu)


@dataclass(frozen=True)
class TheoryDescriptor:
    families: int
    lattice: MomentumLattice
    dim: int
    c: float = 1.0
    mu: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.families not in (1, 2, 3, 6):
            raise ValueError(f"family count must be 1, 2, 3 or 6, got {self.families}")
        if self.dim < 2:
            raise DimensionError(f"truncation D must be >= 2, got {self.dim}")

    @property
    def n_points(self) -> int:
        return len(self.lattice)

    @property
    def n_modes(self) -> int:
        return self.families * self.n_points

    @property
    def omegas(self) -> np.ndarray:
        return self.lattice.omegas(self.c, self.mu)

    def alphas(self) -> np.ndarray:
        return np.array(
            [alpha_factor(k, self.lattice.delta_k, self.c, self.mu) for k in self.lattice.array()]
        )


class Theory:
    """Composite Fock space of a :class:`TheoryDescriptor` with lifted operators."""

    def __init__(self, desc: TheoryDescriptor, cap: int = DIM_CAP):
        width = desc.n_modes
        attempted = desc.dim**width
        if attempted > cap:
            raise CapacityError(
                f"theory dimension {desc.dim}^{width} = {attempted} exceeds cap {cap}",
                attempted=attempted,
                cap=cap,
            )
        self.desc = desc
        self.composite = tensor_compose([mode_basis(desc.dim)] * width, cap=cap)
        self.basis = self.composite.basis
        # per composite mode: the frequency of its lattice point
        self.mode_omegas = np.tile(desc.omegas, desc.families)
        self.mode_omegas.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def mode_index(self, family: int, point: int) -> int:
        if not (0 <= family < self.desc.families and 0 <= point < self.desc.n_points):
            raise IndexError(
                f"(family, point) = ({family}, {point}) outside "
                f"{self.desc.families} x {self.desc.n_points}"
            )
        return family * self.desc.n_points + point

    def lowering(self, family: int, point: int) -> LinearOperator:
        return self.basis.lowering(self.mode_index(family, point))

    def raising(self, family: int, point: int) -> LinearOperator:
        return self.lowering(family, point).adjoint()

    def number(self, family: int, point: int) -> LinearOperator:
        return self.basis.number(self.mode_index(family, point))

    def hamiltonian(self) -> LinearOperator:
        energy = self.basis.occupations @ (self.desc.hbar * self.mode_omegas)
        return LinearOperator(self.basis, sp.diags(energy.astype(np.complex128), format="csr"))

    def __repr__(self):
        d = self.desc
        return f"Theory(F={d.families}, M={d.n_points}, D={d.dim}, dim={self.dim})"


def build_theory(desc: TheoryDescriptor, cap: int = DIM_CAP) -> Theory:
    return Theory(desc, cap=cap)


def _phase_matrix(theory, phases):
    d = theory.desc
    as_float = np.vectorize(lambda p: p.phi if isinstance(p, PhaseLabel) else float(p), otypes=[float])
    arr = as_float(np.atleast_2d(np.asarray(phases, dtype=object)))
    if arr.shape != (d.families, d.n_points):
        raise LabelShapeError(
            f"label shape {arr.shape} does not match (F, M) = ({d.families}, {d.n_points})"
        )
    if np.any(arr < 0) or np.any(arr >= TWO_PI):
        raise LabelShapeError("phases must lie in [0, 2pi)")
    return arr


def ontic_state(theory: Theory, phases) -> StateVector:
    """Product of single-mode phase states; ``phases`` has shape ``(F, M)``."""
    phi = _phase_matrix(theory, phases).reshape(-1)
    amps = np.exp(1j * (theory.basis.occupations @ phi)) / math.sqrt(theory.dim)
    return StateVector(theory.basis, amps)


def lattice_label_phases(theory: Theory, label) -> np.ndarray:
    """``(F, M)`` phases of an integer lattice label (one site per mode)."""
    d = theory.desc
    m = np.asarray(label, dtype=np.int64).reshape(d.families, d.n_points) % d.dim
    return TWO_PI * m / d.dim


@dataclass(frozen=True)
class OnticLattice:
    """All lattice ontic states of a theory.

    ``labels[j]`` holds the per-mode lattice indices of column ``j`` of
    ``matrix``; labels use the same mixed-radix order as occupations.
    """

    theory: Theory = field(repr=False)
    labels: np.ndarray
    matrix: np.ndarray = field(repr=False)

    def __len__(self):
        return self.matrix.shape[1]

    def state(self, j: int) -> StateVector:
        return StateVector(self.theory.basis, self.matrix[:, j])

    def states(self) -> list:
        return [self.state(j) for j in range(len(self))]

    def label_index(self, label) -> int:
        return self.theory.basis.index(np.asarray(label) % self.theory.desc.dim)


def ontic_lattice_basis(theory: Theory, cap: int = GRAM_CAP) -> OnticLattice:
    n = theory.dim
    if n > cap:
        raise CapacityError(f"{n} lattice states exceed the Gram cap {cap}", attempted=n, cap=cap)
    occ = theory.basis.occupations
    # integer residues keep every phase exact before the exponential
    residues = (occ @ occ.T) % theory.desc.dim
    mat = np.exp(1j * TWO_PI * residues / theory.desc.dim) / math.sqrt(n)
    labels = occ.copy()
    labels.setflags(write=False)
    mat.setflags(write=False)
    return OnticLattice(theory, labels, mat)


@dataclass(frozen=True)
class Evolution:
    """``U(t) = exp(sign * i H t / hbar)`` with its predicted action on labels."""

    theory: Theory = field(repr=False)
    t: float
    sign: int
    operator: LinearOperator = field(repr=False)

    def phase_advance(self) -> np.ndarray:
        """Per-(family, point) phase shift, shape ``(F, M)``."""
        d = self.theory.desc
        shift = self.sign * self.theory.mode_omegas * self.t
        return shift.reshape(d.families, d.n_points)

    def shift_phases(self, phases) -> np.ndarray:
        return (_phase_matrix(self.theory, phases) + self.phase_advance()) % TWO_PI

    def lattice_shift(self, atol: float = 1e-9) -> Optional[np.ndarray]:
        """Integer site shift per mode when every advance is on the lattice, else ``None``."""
        steps = self.phase_advance() * self.theory.desc.dim / TWO_PI
        rounded = np.rint(steps)
        if np.max(np.abs(steps - rounded), initial=0.0) > atol:
            return None
        return rounded.astype(np.int64) % self.theory.desc.dim

    def lattice_permutation(self, atol: float = 1e-9) -> Optional[np.ndarray]:
        """``perm[j]`` = column of the lattice state that column ``j`` evolves into."""
        shift = self.lattice_shift(atol)
        if shift is None:
            return None
        basis = self.theory.basis
        targets = (basis.occupations + shift.reshape(-1)) % self.theory.desc.dim
        return targets @ basis.strides


def evolve(theory: Theory, t: float, sign: int = +1) -> Evolution:
    if not math.isfinite(t):
        raise ValueError("evolution time must be finite")
    diag = _accel.number_phases(theory.basis.dims, sign * theory.mode_omegas, t)
    op = LinearOperator(theory.basis, sp.diags(diag, format="csr"))
    return Evolution(theory, float(t), int(sign), op)


def beable_family(theory: Theory, family: int, point: int, variant: str = "sg"):
    """Lifted single-mode beable ``(b, b^dag)`` on mode ``(family, point)``."""
    k = theory.mode_index(family, point)
    if variant == "sg":
        single = beable_sg(theory.desc.dim)
    elif variant == "cyclic":
        single = beable_cyclic(theory.desc.dim)
    else:
        raise ValueError(f"unknown beable variant {variant!r} (use 'sg' or 'cyclic')")
    b = theory.composite.lift(k, single)
    return b, b.adjoint()


@dataclass(frozen=True)
class Expansion:
    """Coefficients of a state over the ontic lattice.

    ``coefficients[m_0, m_1, ...]`` is ``<label|state>`` with one axis per
    composite mode in mode order.
    """

    theory: Theory = field(repr=False)
    coefficients: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2

    def flat(self) -> np.ndarray:
        """Coefficients in the :class:`OnticLattice` column order."""
        return self.coefficients.transpose().reshape(-1)

    def reconstruct(self) -> StateVector:
        n = self.theory.dim
        amps = np.fft.ifftn(self.coefficients) * math.sqrt(n)
        return StateVector(self.theory.basis, amps.transpose().reshape(-1))


def expand_in_ontic(theory: Theory, state: StateVector) -> Expansion:
    if state.basis != theory.basis:
        raise BasisMismatchError(f"state on {state.basis!r}, theory on {theory.basis!r}")
    shape = tuple(int(d) for d in theory.basis.dims[::-1])
    tensor = state.amplitudes.reshape(shape).transpose()
    coeffs = np.fft.fftn(tensor) / math.sqrt(theory.dim)
    return Expansion(theory, coeffs)


def commensurate_lattice(ratios: Sequence[float], mu: float = 1.0) -> MomentumLattice:
    """Points along x whose frequencies are ``ratios[i] * c * mu`` (ratios >= 1)."""
    ks = [math.sqrt(max(r * r - 1.0, 0.0)) * mu for r in ratios]
    return MomentumLattice(1.0, tuple((k, 0.0, 0.0) for k in ks))
