"""Entropic side of the converse, evaluated on explicit codebooks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coding import Codebook, codeword, validate_codebook
from .ensemble import SignalEnsemble
from .entropy import DEFAULT_DIM_CAP, ENTROPY_TOL, EntropyProfile, conditional_entropies, von_neumann_entropy
from .errors import LengthMismatch
from .region import RatePair, contains, pentagon


@dataclass(frozen=True, eq=False)
class ConverseReport:
    length_L: int
    h_code: float
    h_code_a_avg: float  # mean over Alice strings of H(rho_code^a)
    h_code_aprime_avg: float  # mean over Bob strings of H(rho_code^a')
    per_position: list  # EntropyProfile per position
    position_distributions: list  # (p_k, q_k) empirical letter frequencies

    @property
    def sums(self) -> tuple[float, float, float]:
        h = sum(p.h_joint for p in self.per_position)
        ha = sum(p.h_cond_a for p in self.per_position)
        hb = sum(p.h_cond_b for p in self.per_position)
        return h, ha, hb

    @property
    def slacks(self) -> dict:
        h, ha, hb = self.sums
        return {
            "joint": h - self.h_code,
            "alice": ha - self.h_code_aprime_avg,
            "bob": hb - self.h_code_a_avg,
        }

    @property
    def inequalities_hold(self) -> bool:
        return all(v >= -ENTROPY_TOL for v in self.slacks.values())

    def to_dict(self) -> dict:
        h, ha, hb = self.sums
        return {
            "length_L": self.length_L,
            "h_code": self.h_code,
            "h_code_a_avg": self.h_code_a_avg,
            "h_code_aprime_avg": self.h_code_aprime_avg,
            "per_position": [p.to_dict() for p in self.per_position],
            "sum_h": h,
            "sum_h_cond_A": ha,
            "sum_h_cond_B": hb,
            "slacks": self.slacks,
            "inequalities_hold": self.inequalities_hold,
        }


def _mixture(vectors: np.ndarray) -> np.ndarray:
    return vectors.T @ vectors.conj() / len(vectors)


def _frequencies(strings, k, alphabet) -> np.ndarray:
    counts = np.array([sum(1 for s in strings if s[k] == x) for x in alphabet], dtype=float)
    return counts / counts.sum()


def codebook_entropies(e: SignalEnsemble, cb: Codebook, dim_cap: int = DEFAULT_DIM_CAP) -> ConverseReport:
    """Entropies of the equiprobable codeword mixture, its Alice- and
    Bob-conditioned parts, and of the per-position letter ensembles."""
    validate_codebook(e, cb, dim_cap)
    words = np.array([[codeword(e, a, b, dim_cap) for b in cb.bob_strings] for a in cb.alice_strings])
    M, N, D = words.shape
    h_code = von_neumann_entropy(_mixture(words.reshape(M * N, D)))
    h_a = np.mean([von_neumann_entropy(_mixture(words[i])) for i in range(M)])
    h_ap = np.mean([von_neumann_entropy(_mixture(words[:, j])) for j in range(N)])

    profiles, dists = [], []
    for k in range(cb.length_L):
        p_k = _frequencies(cb.alice_strings, k, e.alphabet_a)
        q_k = _frequencies(cb.bob_strings, k, e.alphabet_b)
        dists.append((p_k, q_k))
        profiles.append(conditional_entropies(e.with_distributions(p_k, q_k)))
    return ConverseReport(cb.length_L, h_code, float(h_a), float(h_ap), profiles, dists)


@dataclass(frozen=True)
class ConverseBounds:
    r1_max: float
    r2_max: float
    rsum_max: float
    bob_corner: RatePair  # (Rsum - R2, R2)
    alice_corner: RatePair  # (R1, Rsum - R1)
    corners_in_pentagon: bool

    def to_dict(self) -> dict:
        return {
            "R1_max": self.r1_max,
            "R2_max": self.r2_max,
            "Rsum_max": self.rsum_max,
            "bob_corner": list(self.bob_corner),
            "alice_corner": list(self.alice_corner),
            "corners_in_pentagon": self.corners_in_pentagon,
        }


def converse_bounds(report: ConverseReport, l: int, tol: float = 1e-6) -> ConverseBounds:
    """Position-averaged rate bounds and their two outmost corners."""
    if l != report.length_L or l != len(report.per_position):
        raise LengthMismatch(f"l={l} but the report covers {report.length_L} positions")
    h, ha, hb = (x / l for x in report.sums)
    avg = EntropyProfile(h_joint=h, h_cond_a=ha, h_cond_b=hb)
    region = pentagon(avg)
    bob_corner = RatePair(h - hb, hb)
    alice_corner = RatePair(ha, h - ha)
    inside = contains(region, bob_corner, tol) and contains(region, alice_corner, tol)
    return ConverseBounds(ha, hb, h, bob_corner, alice_corner, inside)
