"""Ontic construction for massless Weyl fermions, one ``(q_hat, s)`` block at a time.

Each block holds ``K`` radial momenta ``|k|_n = (2 pi / L)(n + 1/2)`` on an
antiperiodic ring of ``2K`` sites ``r_j = j dr - L/2``.  Fock modes are
interleaved as ``(a1(k_0), a2(k_0), a1(k_1), a2(k_1), ...)``, so mode
``2n`` is ``a1(k_n)`` and ``2n + 1`` is ``a2(k_n)``.  Site operators

    Psi_j = (2K)**-0.5 * sum_n (a1(k_n) exp(-i s k_n r_j) + a2^dag(k_n) exp(+i s k_n r_j))

are a unitary mix of the CAR pairs ``(a1, a2^dag)``; the sea (every ``a2``
filled) is annihilated by all of them and serves as the ontic vacuum.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from . import _accel
from .errors import CommensurabilityError, DimensionError, LabelShapeError
from .fock import FERMION_MODE_CAP, FockBasis, LinearOperator, StateVector


@dataclass(frozen=True)
class Direction:
    """Unit direction ``q_hat`` at polar angles with its lattice cell size."""

    theta: float
    phi: float = 0.0
    dtheta: float = 0.1
    dphi: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2:
            raise ValueError("q_hat must have q_z >= 0 (theta in [0, pi/2])")

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @property
    def solid_angle_weight(self) -> float:
        return math.sin(self.theta) * self.dtheta * self.dphi


@dataclass(frozen=True)
class FermionGeometry:
    directions: tuple
    K: int
    delta_r: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(self.directions))
        if self.K < 1:
            raise DimensionError("need at least one momentum per block (K >= 1)")
        if self.delta_r <= 0 or self.c <= 0:
            raise ValueError("delta_r and c must be positive")

    @property
    def n_sites(self) -> int:
        return 2 * self.K

    @property
    def ring_length(self) -> float:
        return self.n_sites * self.delta_r

    @property
    def momenta(self) -> np.ndarray:
        return (2.0 * math.pi / self.ring_length) * (np.arange(self.K) + 0.5)

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.n_sites) * self.delta_r - self.ring_length / 2.0

    @property
    def time_step(self) -> float:
        """``dr / c``: the time for one site of shift."""
        return self.delta_r / self.c


def beta_factor(direction: Direction, delta_r: float) -> float:
    """Conversion constant ``sin(theta) dtheta dphi dr`` between ``n_op`` and ``Psi^dag Psi``."""
    return direction.solid_angle_weight * delta_r


def site_transform(geom: FermionGeometry, s: int) -> np.ndarray:
    """``W`` with ``Psi_j = sum_a W[j, a] d_a``, ``d = (a1(k_0), a2^dag(k_0), ...)``."""
    if s not in (1, -1):
        raise ValueError("s must be +1 or -1")
    phase = s * np.outer(geom.sites, geom.momenta)
    w = np.empty((geom.n_sites, geom.n_sites), dtype=np.complex128)
    w[:, 0::2] = np.exp(-1j * phase)
    w[:, 1::2] = np.exp(+1j * phase)
    return w / math.sqrt(geom.n_sites)


def _site_ops_from(transform, lowerings, raisings):
    ops = []
    for row in transform:
        psi = None
        for n in range(len(row) // 2):
            term = row[2 * n] * lowerings[2 * n] + row[2 * n + 1] * raisings[2 * n + 1]
            psi = term if psi is None else psi + term
        ops.append((psi, psi.adjoint()))
    return ops


class FermionBlock:
    """Fock space and ontic machinery of one ``(q_hat, s)`` block."""

    def __init__(self, geom: FermionGeometry, direction: int = 0, s: int = +1,
                 cap: int = FERMION_MODE_CAP):
        if not 0 <= direction < max(len(geom.directions), 1):
            raise IndexError(f"direction {direction} out of range")
        if s not in (1, -1):
            raise ValueError("s must be +1 or -1")
        self.geom = geom
        self.direction = direction
        self.s = s
        self.basis = FockBasis.fermionic(geom.n_sites, cap=cap)
        self._lower = [self.basis.lowering(m) for m in range(self.basis.n_modes)]
        self._raise = [op.adjoint() for op in self._lower]
        self._site_ops = None

    def a1(self, n):
        return self._lower[2 * n]

    def a2(self, n):
        return self._lower[2 * n + 1]

    def transform(self) -> np.ndarray:
        return site_transform(self.geom, self.s)

    def site_operators(self) -> list:
        if self._site_ops is None:
            self._site_ops = _site_ops_from(self.transform(), self._lower, self._raise)
        return self._site_ops

    def sea_state(self) -> StateVector:
        state = self.basis.basis_state([0] * self.basis.n_modes)
        for n in range(self.geom.K):
            state = self.a2(n).adjoint() @ state
        return state

    def bare_vacuum(self) -> StateVector:
        return self.basis.basis_state([0] * self.basis.n_modes)

    def _check_label(self, label):
        label = tuple(int(x) for x in label)
        if len(label) != self.geom.n_sites:
            raise LabelShapeError(f"label has {len(label)} entries, need {self.geom.n_sites}")
        if any(x not in (0, 1) for x in label):
            raise LabelShapeError("fermionic occupations must be 0 or 1")
        return label

    def ontic_state(self, label: Sequence[int]) -> StateVector:
        """Apply ``Psi_j^dag`` for each occupied ``j``, ascending, to the sea."""
        label = self._check_label(label)
        ops = self.site_operators()
        state = self.sea_state()
        for j, n in enumerate(label):
            if n:
                state = ops[j][1] @ state
        return state

    def ontic_basis(self):
        """``(labels, matrix)``; labels in mixed-radix order with site 0 fastest."""
        labels = self.basis.occupations
        cols = [self.ontic_state(lab).amplitudes for lab in labels]
        return labels, np.column_stack(cols)

    def n_op(self, j: int) -> LinearOperator:
        if not 0 <= j < self.geom.n_sites:
            raise IndexError(f"site {j} out of range 0..{self.geom.n_sites - 1}")
        psi, psid = self.site_operators()[j]
        return psid @ psi

    def two_band_number_sum(self) -> LinearOperator:
        """``sum_n (a1^dag a1 + a2 a2^dag)``."""
        out = None
        for n in range(self.geom.K):
            term = self.a1(n).adjoint() @ self.a1(n) + self.a2(n) @ self.a2(n).adjoint()
            out = term if out is None else out + term
        return out

    def evolve(self, t: float, sign: int = +1, exact: bool = True,
               vacuum_shift: bool = True) -> "FermionEvolution":
        return evolve_fermion(self, t, sign=sign, exact=exact, vacuum_shift=vacuum_shift)


def ontic_site_operators(geom: FermionGeometry, direction: int = 0, s: int = +1) -> list:
    return FermionBlock(geom, direction, s).site_operators()


def sea_state(geom: FermionGeometry, direction: int = 0, s: int = +1) -> StateVector:
    return FermionBlock(geom, direction, s).sea_state()


def ontic_state_fermion(geom: FermionGeometry, direction: int, s: int, label) -> StateVector:
    return FermionBlock(geom, direction, s).ontic_state(label)


def n_op_beable(geom: FermionGeometry, direction: int, s: int, j: int) -> LinearOperator:
    return FermionBlock(geom, direction, s).n_op(j)


def shifted_label(label: Sequence[int], shift: int):
    """Move every occupation by ``shift`` sites on the ring.

    Returns ``(new_label, sign, wraps)``: ``sign`` collects ``-1`` per ring
    traversal (antiperiodic sites) times the parity of re-sorting the
    creation operators into ascending order; ``wraps`` counts occupied sites
    that crossed the ring boundary.
    """
    n_sites = len(label)
    occupied = [j for j, n in enumerate(label) if n]
    moved = [j + shift for j in occupied]
    traversals = sum(p // n_sites for p in moved)
    wraps = sum(1 for p in moved if not 0 <= p < n_sites)
    positions = [p % n_sites for p in moved]
    inversions = sum(
        1 for a in range(len(positions)) for b in range(a + 1, len(positions))
        if positions[a] > positions[b]
    )
    new = [0] * n_sites
    for p in positions:
        new[p] = 1
    sign = (-1) ** ((traversals + inversions) % 2)
    return tuple(new), sign, wraps


@dataclass(frozen=True)
class FermionEvolution:
    """``U(t) = exp(sign * i t H)`` of one block with its predicted site shift.

    ``H = sum_n c k_n (a1^dag a1 + a2^dag a2 - 1)``; the ``-1`` (vacuum shift)
    makes the sea energy zero.  With ``sign=+1`` occupations move by
    ``+s`` sites per ``dr / c`` of time.
    """

    block: FermionBlock = field(repr=False)
    t: float
    sign: int
    operator: LinearOperator = field(repr=False)
    site_shift: Optional[int]
    global_phase: complex

    def predict(self, label):
        """``(target_label, predicted_phase, wraps)`` for an ontic label."""
        if self.site_shift is None:
            raise CommensurabilityError("no lattice shift at a non-commensurate time")
        new, sgn, wraps = shifted_label(self.block._check_label(label), self.site_shift)
        return new, sgn * self.global_phase, wraps


def evolve_fermion(block: FermionBlock, t: float, sign: int = +1, exact: bool = True,
                   vacuum_shift: bool = True) -> FermionEvolution:
    geom = block.geom
    if not math.isfinite(t):
        raise ValueError("evolution time must be finite")
    steps = t / geom.time_step
    m = int(round(steps))
    commensurate = abs(steps - m) <= 1e-9 * max(1.0, abs(steps))
    if exact and not commensurate:
        raise CommensurabilityError(
            f"t = {t} is not an integer multiple of dr/c = {geom.time_step}"
        )
    energies = np.repeat(geom.c * geom.momenta, 2)
    diag = _accel.number_phases(block.basis.dims, sign * energies, t)
    offset = geom.c * geom.momenta.sum() if vacuum_shift else 0.0
    diag = diag * np.exp(-sign * 1j * t * offset)
    op = LinearOperator(block.basis, sp.diags(diag, format="csr"))
    # sea energy is sum c k_n - offset
    global_phase = complex(np.exp(sign * 1j * t * (geom.c * geom.momenta.sum() - offset)))
    shift = sign * block.s * m if commensurate else None
    return FermionEvolution(block, float(t), int(sign), op, shift, global_phase)


# ------------------------------------------------------ bosonic counterexample


def bosonic_dirac_failure_demo(dim: int = 4, K: int = 2, s: int = +1, delta_r: float = 1.0) -> dict:
    """Repeat the site-operator construction with commuting modes.

    Returns the max-entry deviation of ``{B_i, B_j^dag}`` from ``delta_ij``,
    the size of ``{B_0, B_1}``, and the largest off-diagonal overlap among
    normalized would-be states ``prod_j (B_j^dag)^{n_j} |0>``.  The same
    numbers for the fermionic block (built on the sea) are the control.
    """
    geom = FermionGeometry((Direction(math.pi / 4),), K, delta_r)
    w = site_transform(geom, s)

    def measure(lower, ref, identity):
        raising = [op.adjoint() for op in lower]
        ops = _site_ops_from(w, lower, raising)
        n = len(ops)
        car = 0.0
        for i in range(n):
            for j in range(n):
                target = identity * (1.0 if i == j else 0.0)
                car = max(car, ops[i][0].anticommutator(ops[j][1]).max_deviation(target))
        pair = ops[0][0].anticommutator(ops[1][0]).max_abs()
        vecs = []
        for lab in FockBasis.fermionic(n).occupations:
            state = ref
            for j, occ in enumerate(lab):
                if occ:
                    state = ops[j][1] @ state
            nrm = state.norm()
            vecs.append(state.amplitudes / nrm if nrm > 0 else state.amplitudes)
        v = np.column_stack(vecs)
        gram = v.conj().T @ v
        off = np.abs(gram - np.diag(np.diag(gram))).max()
        return {"car_deviation": car, "pair_anticommutator": pair, "gram_offdiag": float(off)}

    bbasis = FockBasis.bosonic([dim] * geom.n_sites)
    bosonic = measure(
        [bbasis.lowering(m) for m in range(bbasis.n_modes)],
        bbasis.basis_state([0] * bbasis.n_modes),
        bbasis.identity(),
    )
    block = FermionBlock(geom, 0, s)
    fermionic = measure(
        [block.basis.lowering(m) for m in range(block.basis.n_modes)],
        block.sea_state(),
        block.basis.identity(),
    )
    return {"bosonic": bosonic, "fermionic_control": fermionic, "dim": dim, "K": K}
