"""Finite-blocklength simulation of the two-stage (compound) decoder.

Codewords are tensor products of letter states. Charlie first identifies
Alice's string with operators ``A_a = Pi_a Phi^{-1/2}`` built from the
typical eigenvectors of the conditional product states ``rho_a``, then
identifies Bob's string with a pretty good measurement on the projected
codewords ``Pi_a |S_aa'>``.

Random streams: trial ``t`` of :func:`random_code_average` uses
``numpy.random.PCG64(seed ^ splitmix64(t))``, so results do not depend on
how trials are scheduled.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ensemble import SignalEnsemble, conditional_density, require_valid
from .entropy import DEFAULT_DIM_CAP, conditional_entropies
from .errors import DimensionCapExceeded, InvalidCodebook, LengthMismatch
from .linalg import eig_hermitian, func_on_support, kron_all

DEFAULT_DELTA = 0.2
_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64((int(seed) & _MASK64) ^ splitmix64(trial)))


@dataclass(frozen=True)
class Codebook:
    length_L: int
    alice_strings: tuple
    bob_strings: tuple

    def __post_init__(self):
        object.__setattr__(self, "alice_strings", tuple(tuple(str(c) for c in s) for s in self.alice_strings))
        object.__setattr__(self, "bob_strings", tuple(tuple(str(c) for c in s) for s in self.bob_strings))

    @property
    def M(self) -> int:
        return len(self.alice_strings)

    @property
    def N(self) -> int:
        return len(self.bob_strings)

    def to_dict(self) -> dict:
        return {
            "length_L": self.length_L,
            "alice_strings": [list(s) for s in self.alice_strings],
            "bob_strings": [list(s) for s in self.bob_strings],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Codebook":
        try:
            return cls(int(d["length_L"]), d["alice_strings"], d["bob_strings"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidCodebook(f"malformed codebook: {exc}") from None


def check_cap(e: SignalEnsemble, L: int, dim_cap: int) -> int:
    total = e.dim ** L
    if total > dim_cap:
        raise DimensionCapExceeded(f"d^L = {e.dim}^{L} = {total} exceeds cap {dim_cap}")
    return total


def validate_codebook(e: SignalEnsemble, cb: Codebook, dim_cap: int = DEFAULT_DIM_CAP) -> Codebook:
    if cb.length_L < 1:
        raise InvalidCodebook("length_L must be positive")
    if cb.M < 1 or cb.N < 1:
        raise InvalidCodebook("codebook needs at least one string per sender")
    for s in cb.alice_strings + cb.bob_strings:
        if len(s) != cb.length_L:
            raise LengthMismatch(f"string {''.join(s)!r} does not have length {cb.length_L}")
    for s in cb.alice_strings:
        for c in s:
            e.index_a(c)
    for s in cb.bob_strings:
        for c in s:
            e.index_b(c)
    check_cap(e, cb.length_L, dim_cap)
    return cb


def sizes_from_rates(r1: float, r2: float, L: int) -> tuple[int, int]:
    """Codebook sizes (M, N) = (max(1, floor 2^{L R1}), max(1, floor 2^{L R2}))."""
    return max(1, math.floor(2 ** (L * r1))), max(1, math.floor(2 ** (L * r2)))


def codeword(e: SignalEnsemble, a, a_prime, dim_cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    if len(a) != len(a_prime):
        raise LengthMismatch(f"Alice string has length {len(a)}, Bob's {len(a_prime)}")
    if len(a) < 1:
        raise LengthMismatch("empty strings")
    check_cap(e, len(a), dim_cap)
    return kron_all(e.state(x, y) for x, y in zip(a, a_prime))


def conditional_product_state(e: SignalEnsemble, a, dim_cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """rho_a, the average of |S_aa'><S_aa'| over every Bob string weighted by
    its product probability; equal to the tensor product of rho_{a_t}."""
    check_cap(e, len(a), dim_cap)
    return kron_all(conditional_density(e, "A", x) for x in a)


@dataclass(frozen=True, eq=False)
class TypicalProjector:
    string_a: tuple
    projector: np.ndarray
    kept_eigs: list  # (index into the descending spectrum, eigenvalue)
    vectors: np.ndarray  # kept eigenvectors as columns
    window: tuple  # open interval (low, high)


def _letter_eigs(e: SignalEnsemble):
    return {x: eig_hermitian(conditional_density(e, "A", x)) for x in e.alphabet_a}


def _product_spectrum(a, letter_eigs):
    vals = np.array([1.0])
    vecs = np.ones((1, 1), dtype=complex)
    for x in a:
        eig = letter_eigs[x]
        vals = np.kron(vals, eig.eigenvalues)
        vecs = np.kron(vecs, eig.eigenvectors)
    order = np.argsort(-vals, kind="stable")
    return vals[order], vecs[:, order]


def typical_projector(
    e: SignalEnsemble,
    a,
    delta: float = DEFAULT_DELTA,
    dim_cap: int = DEFAULT_DIM_CAP,
    h_cond_b: float | None = None,
    _letter_cache=None,
) -> TypicalProjector:
    """Projector onto eigenvectors of rho_a whose eigenvalue lies strictly in
    (2^{-L(H_B+delta)}, 2^{-L(H_B-delta)}).

    rho_a is a tensor product, so its eigenvectors are tensor products of the
    single-letter eigenvectors and its eigenvalues the matching products.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    require_valid(e)
    a = tuple(str(c) for c in a)
    L = len(a)
    check_cap(e, L, dim_cap)
    for c in a:
        e.index_a(c)
    if h_cond_b is None:
        h_cond_b = conditional_entropies(e).h_cond_b
    letter_eigs = _letter_cache if _letter_cache is not None else _letter_eigs(e)
    vals, vecs = _product_spectrum(a, letter_eigs)
    lo, hi = 2.0 ** (-L * (h_cond_b + delta)), 2.0 ** (-L * (h_cond_b - delta))
    keep = np.flatnonzero((vals > lo) & (vals < hi))
    kept = vecs[:, keep]
    return TypicalProjector(
        string_a=a,
        projector=kept @ kept.conj().T,
        kept_eigs=[(int(k), float(vals[k])) for k in keep],
        vectors=kept,
        window=(lo, hi),
    )


def typicality_report(e: SignalEnsemble, a, delta: float = DEFAULT_DELTA,
                      dim_cap: int = DEFAULT_DIM_CAP) -> dict:
    tp = typical_projector(e, a, delta, dim_cap)
    rho_a = conditional_product_state(e, a, dim_cap)
    P = tp.projector
    h_b = conditional_entropies(e).h_cond_b
    tr1 = float(np.trace(P @ rho_a @ P).real)
    tr2 = float(np.trace(P @ rho_a @ rho_a @ P).real)
    bound = 2.0 ** (-len(tp.string_a) * (h_b - 3 * delta))
    return {
        "string_a": "".join(tp.string_a),
        "kept": len(tp.kept_eigs),
        "window": list(tp.window),
        "trace_projected_state": tr1,
        "trace_projected_square": tr2,
        "square_bound": bound,
        "square_bound_holds": tr2 <= bound + 1e-12,
        "empty": not tp.kept_eigs,
    }


@dataclass(frozen=True, eq=False)
class FirstStage:
    projectors: list  # TypicalProjector per Alice string
    operators: list  # A_a = sum_k |t_ak><u_ak|
    u_vectors: list  # per a: columns |u_ak> = Phi^{-1/2} |t_ak>
    completeness_defect: float  # largest eigenvalue of I - sum A^dag A
    completeness_excess: float  # max(0, largest eigenvalue of sum A^dag A - 1)


def first_stage_povm(e: SignalEnsemble, cb: Codebook, delta: float = DEFAULT_DELTA,
                     dim_cap: int = DEFAULT_DIM_CAP) -> FirstStage:
    """Square-root measurement over the pooled typical eigenvectors of every
    Alice string: Phi = sum_a Pi_a and |u_ak> = Phi^{-1/2} |t_ak>."""
    validate_codebook(e, cb, dim_cap)
    h_b = conditional_entropies(e).h_cond_b
    cache = _letter_eigs(e)
    tps = [typical_projector(e, a, delta, dim_cap, h_b, cache) for a in cb.alice_strings]
    D = e.dim ** cb.length_L
    phi = sum(tp.projector for tp in tps)
    phi_inv_sqrt = func_on_support(phi, "inv_sqrt")
    ops, us = [], []
    for tp in tps:
        u = phi_inv_sqrt @ tp.vectors
        us.append(u)
        ops.append(tp.vectors @ u.conj().T)
    total = sum(A.conj().T @ A for A in ops)
    lam = eig_hermitian(total).eigenvalues
    defect = float(max(0.0, 1.0 - lam[-1])) if D else 0.0
    excess = float(max(0.0, lam[0] - 1.0))
    return FirstStage(tps, ops, us, defect, excess)


def second_stage_pgm(e: SignalEnsemble, cb: Codebook, a, projector: TypicalProjector,
                     dim_cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Pretty good measurement vectors, one column per Bob string:
    |eta_a'|a> = G_a^{-1/2} Pi_a |S_aa'> with G_a = sum_a' Pi_a|S_aa'><S_aa'|Pi_a."""
    a = tuple(str(c) for c in a)
    if a not in cb.alice_strings:
        raise InvalidCodebook(f"{''.join(a)!r} is not one of Alice's strings")
    words = np.column_stack([codeword(e, a, b, dim_cap) for b in cb.bob_strings])
    projected = projector.projector @ words
    gram = projected @ projected.conj().T
    return func_on_support(gram, "inv_sqrt") @ projected


@dataclass(frozen=True, eq=False)
class DecodeResult:
    p_error: float
    success: np.ndarray  # (M, N) probabilities |<eta_a'|a| A_a |S_aa'>|^2
    p_error_per_a: np.ndarray
    completeness_defect: float
    completeness_excess: float
    typical_dims: list

    def to_dict(self) -> dict:
        return {
            "p_error": self.p_error,
            "p_error_per_a": [float(x) for x in self.p_error_per_a],
            "success": [[float(x) for x in row] for row in self.success],
            "completeness_defect": self.completeness_defect,
            "completeness_excess": self.completeness_excess,
            "typical_dims": list(self.typical_dims),
        }


def _decode(e, cb, first: FirstStage, dim_cap) -> DecodeResult:
    success = np.zeros((cb.M, cb.N))
    for i, a in enumerate(cb.alice_strings):
        tp = first.projectors[i]
        etas = second_stage_pgm(e, cb, a, tp, dim_cap)
        A = first.operators[i]
        for j, b in enumerate(cb.bob_strings):
            s = codeword(e, a, b, dim_cap)
            success[i, j] = abs(np.vdot(etas[:, j], A @ s)) ** 2
    per_a = 1.0 - success.mean(axis=1)
    return DecodeResult(
        p_error=float(np.clip(per_a.mean(), 0.0, 1.0)),
        success=success,
        p_error_per_a=per_a,
        completeness_defect=first.completeness_defect,
        completeness_excess=first.completeness_excess,
        typical_dims=[len(tp.kept_eigs) for tp in first.projectors],
    )


def error_probability(e: SignalEnsemble, cb: Codebook, delta: float = DEFAULT_DELTA,
                      dim_cap: int = DEFAULT_DIM_CAP) -> DecodeResult:
    """P_E = 1 - (1/MN) sum_{a,a'} |<eta_a'|a| A_a |S_aa'>|^2, evaluated exactly."""
    first = first_stage_povm(e, cb, delta, dim_cap)
    return _decode(e, cb, first, dim_cap)


def random_bob_strings(e: SignalEnsemble, N: int, L: int, rng: np.random.Generator) -> list:
    idx = rng.choice(len(e.alphabet_b), size=(N, L), p=e.q)
    return [tuple(e.alphabet_b[k] for k in row) for row in idx]


@dataclass(frozen=True, eq=False)
class RandomCodeAverage:
    mean: float
    std: float
    sem: float
    values: np.ndarray

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std, "sem": self.sem,
                "trials": len(self.values), "values": [float(v) for v in self.values]}


def random_code_average(
    e: SignalEnsemble,
    alice_strings,
    N: int,
    L: int,
    delta: float = DEFAULT_DELTA,
    trials: int = 100,
    seed: int = 0,
    dim_cap: int = DEFAULT_DIM_CAP,
    threads: int = 1,
) -> RandomCodeAverage:
    """Average P_E over Bob codebooks of N strings drawn i.i.d. from q.

    Alice's strings stay fixed, so the first-stage measurement is built once.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if N < 1:
        raise InvalidCodebook("N must be at least 1")
    placeholder = Codebook(L, alice_strings, [tuple(e.alphabet_b[0] for _ in range(L))])
    validate_codebook(e, placeholder, dim_cap)
    first = first_stage_povm(e, placeholder, delta, dim_cap)

    def one(t: int) -> float:
        rng = trial_generator(seed, t)
        cb = Codebook(L, placeholder.alice_strings, random_bob_strings(e, N, L, rng))
        return _decode(e, cb, first, dim_cap).p_error

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = np.array(list(pool.map(one, range(trials))))
    else:
        values = np.array([one(t) for t in range(trials)])
    std = float(values.std(ddof=1)) if trials > 1 else 0.0
    return RandomCodeAverage(float(values.mean()), std, std / math.sqrt(trials), values)
