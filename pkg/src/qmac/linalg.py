"""Dense Hermitian matrix engine.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. Column
vectors are 1-D arrays; ``tensor_product`` accepts either.

Conventions
-----------
* Eigenvalues are returned in descending order.
* Each eigenvector is phase fixed so that its first component with modulus
  above ``PHASE_EPS`` is real and positive.
* Eigenvalues closer than ``TIE_TOL`` form a degenerate group; inside a group
  the eigenvectors are ordered lexicographically by ``(re, im)`` of their
  entries (rounded to 12 decimals), largest first.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DimensionMismatch, NegativeEigenvalue, NotHermitian, NotSquare

HERMITIAN_TOL = 1e-10
NEGATIVE_TOL = 1e-10
SUPPORT_CUTOFF = 1e-12
TIE_TOL = 1e-12
PHASE_EPS = 1e-12


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionMismatch("matrix has non-finite entries")
    return m


def hermitian_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"matrix of shape {m.shape} is not square")
    dev = hermitian_deviation(m)
    if dev > tol:
        raise NotHermitian(f"max |m - m^dagger| = {dev:.3e} exceeds {tol:.0e}")
    return m


def _phase_fix(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = np.flatnonzero(np.abs(col) > PHASE_EPS)
        if idx.size:
            z = col[idx[0]]
            out[:, j] = col * (abs(z) / z)
    return out


def _lex_key(col: np.ndarray) -> tuple:
    r = np.round(col, 12)
    return tuple(x for z in r for x in (z.real, z.imag))


def eig_hermitian(m) -> HermitianEig:
    """Full spectral decomposition of a Hermitian matrix.

    Raises :class:`NotSquare` or :class:`NotHermitian` on bad input. The
    ordering and phase convention is described in the module docstring, so
    identical input always yields identical output.
    """
    m = check_hermitian(m)
    h = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(h)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], _phase_fix(v[:, order])

    final = []
    start = 0
    n = len(w)
    while start < n:
        stop = start + 1
        while stop < n and w[stop - 1] - w[stop] <= TIE_TOL:
            stop += 1
        group = list(range(start, stop))
        if len(group) > 1:
            group.sort(key=lambda j: _lex_key(v[:, j]), reverse=True)
        final.extend(group)
        start = stop
    final = np.asarray(final, dtype=int)
    return HermitianEig(eigenvalues=w[final].copy(), eigenvectors=v[:, final].copy())


_FUNCS = {
    "log2": np.log2,
    "sqrt": np.sqrt,
    "inv_sqrt": lambda x: 1.0 / np.sqrt(x),
}


def func_on_support(m, f: str, support_cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Apply ``f`` to the eigenvalues of a PSD matrix above ``support_cutoff``.

    Eigenvalues at or below the cutoff map to zero for every tag, so
    ``inv_sqrt`` is the pseudo-inverse square root and ``log2`` is the
    logarithm restricted to the support.
    """
    if f not in _FUNCS:
        raise ValueError(f"unknown function tag {f!r}; expected one of {sorted(_FUNCS)}")
    if support_cutoff <= 0:
        raise ValueError("support_cutoff must be positive")
    eig = eig_hermitian(m)
    lam = eig.eigenvalues
    if lam.size and lam.min() < -NEGATIVE_TOL:
        raise NegativeEigenvalue(f"eigenvalue {lam.min():.3e} below -{NEGATIVE_TOL:.0e}")
    keep = lam > support_cutoff
    fl = np.zeros_like(lam)
    fl[keep] = _FUNCS[f](lam[keep])
    v = eig.eigenvectors
    return (v * fl) @ v.conj().T


def support_projector(m, support_cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    eig = eig_hermitian(m)
    v = eig.eigenvectors[:, eig.eigenvalues > support_cutoff]
    return v @ v.conj().T


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product; composite index is ``i_a * dim_b + i_b``.

    Two 1-D inputs give a 1-D result.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.kron(a, b)


def kron_all(factors) -> np.ndarray:
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor")
    return reduce(tensor_product, factors)


def partial_trace_multi(m, dims, keep) -> np.ndarray:
    """Reduced matrix on the subsystems listed in ``keep`` (in original order)."""
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise DimensionMismatch(f"matrix shape {m.shape} does not match subsystem dims {dims}")
    keep = sorted(set(keep))
    n = len(dims)
    t = m.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # contract from the highest index down so remaining axes keep their positions
    for count, ax in enumerate(sorted(traced, reverse=True)):
        cur_n = n - count
        t = np.trace(t, axis1=ax, axis2=ax + cur_n)
    kd = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(kd, kd)


def partial_trace(m, dims, keep: str = "A") -> np.ndarray:
    """Bipartite partial trace; ``keep`` is ``"A"`` or ``"B"``."""
    if keep not in ("A", "B"):
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    d_a, d_b = dims
    m = check_hermitian(m)
    if m.shape[0] != d_a * d_b:
        raise DimensionMismatch(f"dimension {m.shape[0]} != {d_a}*{d_b}")
    return partial_trace_multi(m, (d_a, d_b), [0] if keep == "A" else [1])


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())
