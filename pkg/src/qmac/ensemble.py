"""Two-sender signal ensembles and their density matrices."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidEnsemble, UnknownLetter
from .linalg import HERMITIAN_TOL, NEGATIVE_TOL, hermitian_deviation

NORM_TOL = 1e-10
PROB_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SignalEnsemble:
    """Pure letter states ``states[i, j]`` sent when Alice picks
    ``alphabet_a[i]`` and Bob picks ``alphabet_b[j]``, drawn with product
    probability ``p[i] * q[j]``.

    Nothing is checked at construction; call :func:`validate_ensemble`.
    """

    alphabet_a: tuple
    alphabet_b: tuple
    states: np.ndarray  # shape (|A|, |B|, dim)
    p: np.ndarray
    q: np.ndarray
    _index_a: dict = field(init=False, repr=False, compare=False)
    _index_b: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet_a", tuple(str(x) for x in self.alphabet_a))
        object.__setattr__(self, "alphabet_b", tuple(str(x) for x in self.alphabet_b))
        object.__setattr__(self, "states", np.asarray(self.states, dtype=complex))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        object.__setattr__(self, "_index_a", {a: i for i, a in enumerate(self.alphabet_a)})
        object.__setattr__(self, "_index_b", {b: j for j, b in enumerate(self.alphabet_b)})

    @property
    def dim(self) -> int:
        return int(self.states.shape[-1])

    def index_a(self, letter) -> int:
        try:
            return self._index_a[str(letter)]
        except KeyError:
            raise UnknownLetter(f"{letter!r} is not in Alice's alphabet {self.alphabet_a}") from None

    def index_b(self, letter) -> int:
        try:
            return self._index_b[str(letter)]
        except KeyError:
            raise UnknownLetter(f"{letter!r} is not in Bob's alphabet {self.alphabet_b}") from None

    def state(self, alpha, beta) -> np.ndarray:
        return self.states[self.index_a(alpha), self.index_b(beta)]

    def with_distributions(self, p, q) -> "SignalEnsemble":
        return SignalEnsemble(self.alphabet_a, self.alphabet_b, self.states, p, q)


def validate_ensemble(e: SignalEnsemble) -> list[str]:
    """Return a list of human-readable invariant violations (empty if valid)."""
    problems = []
    na, nb = len(e.alphabet_a), len(e.alphabet_b)
    if na < 1:
        problems.append("alphabet_A is empty")
    if nb < 1:
        problems.append("alphabet_B is empty")
    if len(set(e.alphabet_a)) != na:
        problems.append("alphabet_A has duplicate labels")
    if len(set(e.alphabet_b)) != nb:
        problems.append("alphabet_B has duplicate labels")
    s = e.states
    if s.ndim != 3 or s.shape[:2] != (na, nb) or s.shape[2] < 1:
        problems.append(f"states table has shape {s.shape}, expected ({na}, {nb}, d) with d >= 1")
    else:
        if not np.all(np.isfinite(s)):
            problems.append("states contain non-finite entries")
        norms = np.linalg.norm(s, axis=2)
        for i, j in zip(*np.nonzero(np.abs(norms - 1.0) > NORM_TOL)):
            problems.append(
                f"state ({e.alphabet_a[i]}, {e.alphabet_b[j]}) has norm {norms[i, j]:.12g}, not 1"
            )
    for name, dist, n in (("p", e.p, na), ("q", e.q, nb)):
        if dist.shape != (n,):
            problems.append(f"{name} has shape {dist.shape}, expected ({n},)")
            continue
        if not np.all(np.isfinite(dist)) or np.any(dist < 0):
            problems.append(f"{name} has negative or non-finite entries")
        total = float(np.sum(dist))
        if abs(total - 1.0) > PROB_TOL:
            problems.append(f"{name} sums to {total:.12g}, not 1")
    return problems


def require_valid(e: SignalEnsemble) -> SignalEnsemble:
    problems = validate_ensemble(e)
    if problems:
        raise InvalidEnsemble("; ".join(problems))
    return e


def _mix(vectors: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # sum_i w_i |v_i><v_i| for vectors stacked along axis 0
    return np.einsum("i,ik,il->kl", weights, vectors, vectors.conj())


def joint_density(e: SignalEnsemble) -> np.ndarray:
    require_valid(e)
    w = np.outer(e.p, e.q).ravel()
    return _mix(e.states.reshape(-1, e.dim), w)


def conditional_density(e: SignalEnsemble, fix: str, letter) -> np.ndarray:
    """rho_alpha (``fix="A"``, averaged over Bob with q) or rho_beta
    (``fix="B"``, averaged over Alice with p)."""
    require_valid(e)
    if fix == "A":
        return _mix(e.states[e.index_a(letter)], e.q)
    if fix == "B":
        return _mix(e.states[:, e.index_b(letter)], e.p)
    raise ValueError(f"fix must be 'A' or 'B', got {fix!r}")


def conditional_densities(e: SignalEnsemble, fix: str) -> list[np.ndarray]:
    letters = e.alphabet_a if fix == "A" else e.alphabet_b
    return [conditional_density(e, fix, x) for x in letters]


def is_density_matrix(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or hermitian_deviation(m) > tol:
        return False
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    return bool(w.min() >= -NEGATIVE_TOL and abs(np.trace(m).real - 1.0) <= tol)


# --- constructors ---------------------------------------------------------

def two_basis_example() -> SignalEnsemble:
    """Four qubit letter states |0>, |1>, |+>, |-> under uniform p, q.

    Alice's letters are ``A``/``B``, Bob's ``C``/``D``.
    """
    r = 1 / np.sqrt(2)
    states = np.array(
        [
            [[1, 0], [0, 1]],   # AC, AD
            [[r, r], [r, -r]],  # BC, BD
        ],
        dtype=complex,
    )
    return SignalEnsemble(("A", "B"), ("C", "D"), states, [0.5, 0.5], [0.5, 0.5])


def classical_ensemble(p, q) -> SignalEnsemble:
    """Orthogonal letters |alpha> (x) |beta>; the classical MAC limit."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    na, nb = len(p), len(q)
    states = np.zeros((na, nb, na * nb), dtype=complex)
    for i in range(na):
        for j in range(nb):
            states[i, j, i * nb + j] = 1.0
    return SignalEnsemble(
        tuple(f"a{i}" for i in range(na)), tuple(f"b{j}" for j in range(nb)), states, p, q
    )


def random_ensemble(rng: np.random.Generator, dim: int, n_a: int, n_b: int) -> SignalEnsemble:
    """Haar-like random pure letter states with flat-Dirichlet distributions."""
    z = rng.normal(size=(n_a, n_b, dim)) + 1j * rng.normal(size=(n_a, n_b, dim))
    z /= np.linalg.norm(z, axis=2, keepdims=True)
    p = rng.dirichlet(np.ones(n_a))
    q = rng.dirichlet(np.ones(n_b))
    # dirichlet output may miss unit sum by a few ulps
    p /= p.sum()
    q /= q.sum()
    return SignalEnsemble(
        tuple(f"a{i}" for i in range(n_a)), tuple(f"b{j}" for j in range(n_b)), z, p, q
    )
