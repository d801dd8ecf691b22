"""Single-mode cogwheel machinery.

A mode truncated at ``D`` Fock levels carries ``D`` lattice phase states
``|phi_m> = D**-0.5 * sum_n exp(i phi_m n)|n>`` with ``phi_m = 2 pi m / D``.
They are orthonormal and complete, the cyclic shift is diagonal on them, and
number-diagonal evolution ``exp(+i omega t N)`` turns the wheel by
``omega t``.  The one-sided beable ``(I + N)**-0.5 A`` misses the cyclic
shift only by the wraparound element ``|D-1><0|``.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, TruncationError
from .fock import FockBasis, LinearOperator, StateVector, make_boson_mode

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhaseLabel:
    """A cogwheel position ``phi`` in ``[0, 2 pi)``, optionally a lattice site."""

    phi: float
    m: Optional[int] = None
    dim: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.phi < TWO_PI:
            raise ValueError(f"phase {self.phi} outside [0, 2pi)")

    @classmethod
    def lattice(cls, m: int, dim: int) -> "PhaseLabel":
        m = int(m) % dim
        return cls(TWO_PI * m / dim, m, dim)

    @classmethod
    def wrap(cls, phi: float) -> "PhaseLabel":
        phi = float(phi) % TWO_PI
        return cls(0.0 if phi >= TWO_PI else phi)


@dataclass(frozen=True)
class CogwheelMode:
    dim: int
    omega: float

    def __post_init__(self):
        if self.dim < 2:
            raise DimensionError(f"cogwheel needs D >= 2, got {self.dim}")
        if self.omega < 0:
            raise ValueError("omega must be non-negative")


def _check_dim(dim):
    if int(dim) != dim or dim < 2:
        raise DimensionError(f"cogwheel needs D >= 2, got {dim}")
    return int(dim)


def _phi(phi):
    return phi.phi if isinstance(phi, PhaseLabel) else float(phi)


def mode_basis(dim: int) -> FockBasis:
    return FockBasis.bosonic([dim])


def lattice_phases(dim: int) -> np.ndarray:
    return TWO_PI * np.arange(dim) / dim


def phase_amplitudes(dim: int, phi) -> np.ndarray:
    n = np.arange(dim)
    return np.exp(1j * _phi(phi) * n) / math.sqrt(dim)


def phase_state(dim: int, phi) -> StateVector:
    dim = _check_dim(dim)
    return StateVector(mode_basis(dim), phase_amplitudes(dim, phi))


def ontic_matrix(dim: int) -> np.ndarray:
    """Columns are the lattice phase states of one mode."""
    dim = _check_dim(dim)
    return np.exp(1j * np.outer(np.arange(dim), lattice_phases(dim))) / math.sqrt(dim)


def ontic_basis(dim: int) -> list:
    dim = _check_dim(dim)
    return [phase_state(dim, PhaseLabel.lattice(m, dim)) for m in range(dim)]


def beable_sg(dim: int) -> LinearOperator:
    """``(I + N)**-0.5 A`` via functional calculus on the number diagonal."""
    dim = _check_dim(dim)
    a, _, n = make_boson_mode(dim)
    inv_sqrt = sp.diags(1.0 / np.sqrt(1.0 + n.diagonal().real), format="csr")
    return LinearOperator(a.basis, inv_sqrt @ a.matrix)


def beable_cyclic(dim: int) -> LinearOperator:
    """Exact cogwheel shift ``sum_n |n-1 mod D><n|``."""
    dim = _check_dim(dim)
    cols = np.arange(dim)
    rows = (cols - 1) % dim
    mat = sp.csr_matrix((np.ones(dim, dtype=np.complex128), (rows, cols)), shape=(dim, dim))
    return LinearOperator(mode_basis(dim), mat)


def beable_from_projectors(dim: int) -> LinearOperator:
    """``sum_m exp(i phi_m) |phi_m><phi_m|`` summed explicitly."""
    dim = _check_dim(dim)
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for m, phi in enumerate(lattice_phases(dim)):
        v = phase_amplitudes(dim, phi)
        acc += np.exp(1j * phi) * np.outer(v, v.conj())
    return LinearOperator.from_dense(mode_basis(dim), acc)


def wraparound_element(dim: int) -> LinearOperator:
    """``|D-1><0|``, the gap between the cyclic and one-sided beables."""
    dim = _check_dim(dim)
    mat = sp.csr_matrix(([1.0 + 0j], ([dim - 1], [0])), shape=(dim, dim))
    return LinearOperator(mode_basis(dim), mat)


def evolve_mode(mode: CogwheelMode, t: float, sign: int = +1) -> LinearOperator:
    """``exp(sign * i omega t N)``; ``sign=+1`` advances ``phi`` by ``omega t``."""
    if not math.isfinite(t):
        raise ValueError("evolution time must be finite")
    n = np.arange(mode.dim)
    diag = np.exp(sign * 1j * mode.omega * t * n)
    return LinearOperator(mode_basis(mode.dim), sp.diags(diag, format="csr"))


def advanced_phase(phi, omega: float, t: float, sign: int = +1) -> float:
    return (_phi(phi) + sign * omega * t) % TWO_PI


def fock_from_ontic(dim: int, n: int) -> StateVector:
    """Rebuild ``|n>`` as ``D**-0.5 * sum_m exp(-i phi_m n) |phi_m>``."""
    dim = _check_dim(dim)
    if not 0 <= n < dim:
        raise DimensionError(f"occupation {n} out of range 0..{dim - 1}")
    acc = np.zeros(dim, dtype=np.complex128)
    for phi in lattice_phases(dim):
        acc += np.exp(-1j * phi * n) * phase_amplitudes(dim, phi)
    return StateVector(mode_basis(dim), acc / math.sqrt(dim))


# ------------------------------------------------------------------ coherent


def _check_coherent(dim, z):
    if abs(z) ** 2 > dim / 4:
        raise TruncationError(
            f"|z|^2 = {abs(z) ** 2:.4g} exceeds D/4 = {dim / 4:.4g}; raise the truncation"
        )


def coherent_state(dim: int, z: complex) -> StateVector:
    """Truncated, renormalized ``sum_n z**n / sqrt(n!) |n>``."""
    if int(dim) != dim or dim < 1:
        raise DimensionError(f"truncation must be >= 1, got {dim}")
    z = complex(z)
    _check_coherent(dim, z)
    amps = np.empty(dim, dtype=np.complex128)
    amps[0] = 1.0
    for n in range(1, dim):
        amps[n] = amps[n - 1] * z / math.sqrt(n)
    return StateVector(mode_basis(dim), amps).normalized()


def coherent_overlap(dim: int, z: complex, zp: complex) -> complex:
    """``<z|z'>`` for truncated coherent states."""
    return coherent_state(dim, z).inner(coherent_state(dim, zp))


def coherent_overlap_closed_form(z: complex, zp: complex) -> complex:
    """Untruncated ``<z|z'> = exp(-|z|^2/2 - |z'|^2/2 + conj(z) z')``."""
    z, zp = complex(z), complex(zp)
    return complex(np.exp(-0.5 * abs(z) ** 2 - 0.5 * abs(zp) ** 2 + z.conjugate() * zp))


def coherent_circle_family(dim: int, radius: float, n_phases: int) -> list:
    """Coherent states at ``radius * exp(i phi_m)`` on an ``n_phases`` lattice."""
    return [
        coherent_state(dim, radius * np.exp(1j * TWO_PI * m / n_phases))
        for m in range(n_phases)
    ]


# ----------------------------------------------------------- fermion demo


def _would_be_phase_state(raising: LinearOperator, phi: float, n_max: int) -> StateVector:
    vac = raising.basis.basis_state([0] * raising.basis.n_modes)
    acc = raising.basis.zero_state()
    term = vac
    for n in range(n_max + 1):
        if n:
            term = raising @ term
        acc = acc + term * (np.exp(1j * phi * n) / math.sqrt(math.factorial(n)))
    return acc


def _fourier_projections(raising, n_max):
    n_phases = 2 * (n_max + 1)
    phis = TWO_PI * np.arange(n_phases) / n_phases
    states = [_would_be_phase_state(raising, phi, n_max) for phi in phis]
    norms = {}
    for n in range(n_max + 1):
        acc = raising.basis.zero_state()
        for phi, s in zip(phis, states):
            acc = acc + s * np.exp(-1j * phi * n)
        norms[n] = (acc * (1.0 / n_phases)).norm()
    return norms


def fermion_phase_constraint_demo(n_max: int = 4) -> dict:
    """Build boson-style phase states from a nilpotent fermion creator.

    Fourier-projecting onto occupation ``n`` leaves nothing for ``n >= 2``
    because ``(c^dag)**2 = 0``.  The same construction on a boson mode with
    ``n_max + 1`` levels is the control (every projection has norm 1).
    """
    fbasis = FockBasis.fermionic(1)
    cdag = fbasis.raising(0)
    power_norms = {n: cdag.power(n).frobenius() for n in range(n_max + 1)}
    _, adag, _ = make_boson_mode(n_max + 1)
    return {
        "projection_norms": _fourier_projections(cdag, n_max),
        "creator_power_norms": power_norms,
        "bosonic_control_norms": _fourier_projections(adag, n_max),
        "n_max": n_max,
    }
