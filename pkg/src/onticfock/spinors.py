"""Chiral gamma matrices, helicity 2-spinors and the Weyl plane-wave symbol."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularSpinorError

SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)

# Weyl (chiral) representation.
_GAMMA_TABLE = (
    [[0, 0, -1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, -1, 0, 0]],
    [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]],
    [[0, 0, 0, -1j], [0, 0, 1j, 0], [0, 1j, 0, 0], [-1j, 0, 0, 0]],
    [[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]],
)


@dataclass(frozen=True)
class GammaSet:
    matrices: tuple

    def __getitem__(self, mu):
        return self.matrices[mu]

    def __len__(self):
        return len(self.matrices)


def gamma_chiral() -> GammaSet:
    mats = []
    for table in _GAMMA_TABLE:
        g = np.array(table, dtype=np.complex128)
        g.setflags(write=False)
        mats.append(g)
    return GammaSet(tuple(mats))


@dataclass(frozen=True)
class CliffordTable:
    """``{g^mu, g^nu}`` for all pairs with the best scalar fit of each.

    ``scalars[mu, nu]`` is ``tr({g^mu, g^nu}) / 4`` and ``residuals[mu, nu]``
    the max entry of ``{g^mu, g^nu} - scalars[mu, nu] * I``.
    """

    anticommutators: np.ndarray
    scalars: np.ndarray
    residuals: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max())

    @property
    def signature(self) -> tuple:
        """Signs of ``{g^mu, g^mu} / 2`` read off the computed table."""
        diag = np.real(np.diag(self.scalars)) / 2.0
        return tuple(int(np.sign(round(x))) for x in diag)


def clifford_check(g: GammaSet) -> CliffordTable:
    n = len(g)
    size = g[0].shape[0]
    anti = np.empty((n, n, size, size), dtype=np.complex128)
    scalars = np.empty((n, n), dtype=np.complex128)
    resid = np.empty((n, n))
    eye = np.eye(size)
    for mu in range(n):
        for nu in range(n):
            a = g[mu] @ g[nu] + g[nu] @ g[mu]
            anti[mu, nu] = a
            scalars[mu, nu] = np.trace(a) / size
            resid[mu, nu] = np.abs(a - scalars[mu, nu] * eye).max()
    return CliffordTable(anti, scalars, resid)


def helicity_operator(k) -> np.ndarray:
    """``sigma . k_hat``."""
    k = np.asarray(k, dtype=np.float64)
    norm = np.linalg.norm(k)
    if norm == 0.0:
        raise ValueError("helicity is undefined for k = 0")
    return sum(ki * s for ki, s in zip(k / norm, SIGMA))


def weyl_spinor(k, helicity: int, limit: bool = False) -> np.ndarray:
    """Helicity spinor ``u^h(k)``.

    The closed form is 0/0 along ``k = -h z |k|``.  With ``limit=True`` the
    value ``(0, 1)`` is returned there; otherwise :class:`SingularSpinorError`.
    """
    if helicity not in (1, -1):
        raise ValueError("helicity must be +1 or -1")
    kx, ky, kz = (float(x) for x in k)
    norm = float(np.sqrt(kx * kx + ky * ky + kz * kz))
    if norm == 0.0:
        raise ValueError("spinor direction is undefined for k = 0")
    if helicity * kz >= 0:
        gap = norm + helicity * kz
        return np.array([helicity * gap, kx + 1j * ky], dtype=np.complex128) / np.sqrt(2.0 * norm * gap)
    # |k| + h k_z = rho^2 / (|k| - h k_z): rewrite to avoid cancellation and underflow
    rho = math.hypot(kx, ky)
    if rho == 0.0:
        if limit:
            return np.array([0.0, 1.0], dtype=np.complex128)
        raise SingularSpinorError(
            f"u{'+' if helicity > 0 else '-'} has denominator 2|k|(|k| {'+' if helicity > 0 else '-'} k_z) = 0 "
            f"at k = ({kx}, {ky}, {kz}); pass limit=True for the continuity value (0, 1)"
        )
    far = norm - helicity * kz
    return np.array(
        [helicity * rho / math.sqrt(2.0 * norm * far), (kx + 1j * ky) / rho * math.sqrt(far / (2.0 * norm))],
        dtype=np.complex128,
    )


def weyl_spinors(k, limit: bool = False):
    return weyl_spinor(k, +1, limit), weyl_spinor(k, -1, limit)


def weyl_symbol(k, omega: float, c: float = 1.0) -> np.ndarray:
    """Weyl differential operator acting on ``exp(i(k.x - omega t))``."""
    kx, ky, kz = (float(x) for x in k)
    dt, dx, dy, dz = -1j * omega, 1j * kx, 1j * ky, 1j * kz
    return np.array(
        [[dt / c + dz, dx - 1j * dy], [dx + 1j * dy, dt / c - dz]], dtype=np.complex128
    )


def weyl_plane_wave_residual(k, helicity: int, frequency_sign: int = +1, c: float = 1.0) -> float:
    """``|| W(k, omega) u^h ||`` with ``omega = frequency_sign * h * c |k|``."""
    norm = float(np.linalg.norm(k))
    if norm == 0.0:
        raise ValueError("plane-wave residual is undefined for k = 0")
    u = weyl_spinor(k, helicity, limit=True)
    omega = frequency_sign * helicity * c * norm
    return float(np.linalg.norm(weyl_symbol(k, omega, c) @ u))


def solving_frequency_sign(k, helicity: int, c: float = 1.0) -> int:
    """The ``frequency_sign`` with the smaller residual, decided numerically."""
    plus = weyl_plane_wave_residual(k, helicity, +1, c)
    minus = weyl_plane_wave_residual(k, helicity, -1, c)
    return +1 if plus <= minus else -1
