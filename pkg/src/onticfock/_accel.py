"""Hot inner loops over Fock-basis indices.

Every kernel exists twice: a numba ``@njit`` version and a pure numpy
version with identical outputs.  The numba path is used when numba imports
and the environment variable ``ONTICFOCK_NO_NUMBA`` is unset or ``0``.
Both implementations stay importable (``*_numba`` / ``*_numpy``) so tests and
the benchmark can compare them directly.
"""

import os

import numpy as np

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("ONTICFOCK_NO_NUMBA", "0") in ("", "0")
BACKEND = "numba" if USE_NUMBA else "numpy"


def strides_for(dims):
    """Mixed-radix strides with mode 0 fastest-varying."""
    dims = np.asarray(dims, dtype=np.int64)
    strides = np.ones(len(dims), dtype=np.int64)
    if len(dims) > 1:
        strides[1:] = np.cumprod(dims[:-1])
    return strides


# ---------------------------------------------------------------- numpy path


def occupations_numpy(dims):
    dims = np.asarray(dims, dtype=np.int64)
    dim = int(np.prod(dims))
    idx = np.arange(dim, dtype=np.int64)
    out = np.empty((dim, len(dims)), dtype=np.int64)
    for m, d in enumerate(dims):
        out[:, m] = idx % d
        idx = idx // d
    return out


def lowering_coo_numpy(dims, fermionic, mode):
    dims = np.asarray(dims, dtype=np.int64)
    fermionic = np.asarray(fermionic, dtype=np.bool_)
    occ = occupations_numpy(dims)
    stride = strides_for(dims)[mode]
    n = occ[:, mode]
    cols = np.nonzero(n > 0)[0]
    rows = cols - stride
    if fermionic[mode]:
        below = occ[cols][:, :mode][:, fermionic[:mode]].sum(axis=1)
        vals = np.where(below % 2 == 0, 1.0, -1.0)
    else:
        vals = np.sqrt(n[cols].astype(np.float64))
    return rows.astype(np.int64), cols.astype(np.int64), vals


def number_phases_numpy(dims, freqs, t):
    occ = occupations_numpy(dims)
    energy = occ @ np.asarray(freqs, dtype=np.float64)
    return np.exp(1j * t * energy)


def compensated_gram_numpy(vecs):
    # Kahan summation over the amplitude axis, vectorized across all pairs.
    vecs = np.asarray(vecs, dtype=np.complex128)
    n = vecs.shape[1]
    total = np.zeros((n, n), dtype=np.complex128)
    comp = np.zeros((n, n), dtype=np.complex128)
    for row in vecs:
        term = np.outer(row.conj(), row) - comp
        new = total + term
        comp = (new - total) - term
        total = new
    return total


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def occupations_numba(dims):
        nm = dims.shape[0]
        dim = 1
        for d in dims:
            dim *= d
        out = np.empty((dim, nm), dtype=np.int64)
        for i in range(dim):
            r = i
            for m in range(nm):
                out[i, m] = r % dims[m]
                r //= dims[m]
        return out

    @njit(cache=True)
    def lowering_coo_numba(dims, fermionic, mode):
        nm = dims.shape[0]
        dim = 1
        stride = 1
        for m in range(nm):
            if m < mode:
                stride *= dims[m]
            dim *= dims[m]
        count = (dim // dims[mode]) * (dims[mode] - 1)
        rows = np.empty(count, dtype=np.int64)
        cols = np.empty(count, dtype=np.int64)
        vals = np.empty(count, dtype=np.float64)
        k = 0
        for i in range(dim):
            r = i
            parity = 0
            n = 0
            for m in range(mode + 1):
                digit = r % dims[m]
                r //= dims[m]
                if m < mode:
                    if fermionic[m]:
                        parity += digit
                else:
                    n = digit
            if n > 0:
                rows[k] = i - stride
                cols[k] = i
                if fermionic[mode]:
                    vals[k] = 1.0 if parity % 2 == 0 else -1.0
                else:
                    vals[k] = np.sqrt(np.float64(n))
                k += 1
        return rows, cols, vals

    @njit(cache=True)
    def number_phases_numba(dims, freqs, t):
        nm = dims.shape[0]
        dim = 1
        for d in dims:
            dim *= d
        out = np.empty(dim, dtype=np.complex128)
        for i in range(dim):
            r = i
            e = 0.0
            for m in range(nm):
                e += freqs[m] * (r % dims[m])
                r //= dims[m]
            out[i] = np.exp(1j * t * e)
        return out

    @njit(cache=True)
    def compensated_gram_numba(vecs):
        dim, n = vecs.shape
        out = np.empty((n, n), dtype=np.complex128)
        for a in range(n):
            for b in range(n):
                total = 0.0 + 0.0j
                comp = 0.0 + 0.0j
                for i in range(dim):
                    term = np.conj(vecs[i, a]) * vecs[i, b] - comp
                    new = total + term
                    comp = (new - total) - term
                    total = new
                out[a, b] = total
        return out


# ---------------------------------------------------------------- dispatch


def occupations(dims):
    """Occupation table of shape ``(prod(dims), len(dims))``."""
    dims = np.ascontiguousarray(dims, dtype=np.int64)
    if USE_NUMBA:
        return occupations_numba(dims)
    return occupations_numpy(dims)


def lowering_coo(dims, fermionic, mode):
    """COO triplets of the lowering operator of ``mode`` in a mixed basis.

    Fermionic modes carry a Jordan-Wigner sign over occupied fermionic modes
    of lower index; bosonic modes get ``sqrt(n)``.
    """
    dims = np.ascontiguousarray(dims, dtype=np.int64)
    fermionic = np.ascontiguousarray(fermionic, dtype=np.bool_)
    if USE_NUMBA:
        return lowering_coo_numba(dims, fermionic, int(mode))
    return lowering_coo_numpy(dims, fermionic, int(mode))


def number_phases(dims, freqs, t):
    """Diagonal ``exp(i t sum_m freqs[m] n_m)`` over the basis."""
    dims = np.ascontiguousarray(dims, dtype=np.int64)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    if USE_NUMBA:
        return number_phases_numba(dims, freqs, float(t))
    return number_phases_numpy(dims, freqs, float(t))


def compensated_gram(vecs):
    """Gram matrix ``V^H V`` accumulated with Kahan summation."""
    vecs = np.ascontiguousarray(vecs, dtype=np.complex128)
    if USE_NUMBA:
        return compensated_gram_numba(vecs)
    return compensated_gram_numpy(vecs)
