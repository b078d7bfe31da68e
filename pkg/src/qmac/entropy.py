"""Shannon and von Neumann entropies (bits) and the conditional entropies
that bound the two senders' rates."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .ensemble import (
    PROB_TOL,
    SignalEnsemble,
    conditional_densities,
    joint_density,
    require_valid,
)
from .errors import DimensionCapExceeded, DimensionMismatch, InvalidDistribution
from .linalg import SUPPORT_CUTOFF, eig_hermitian, ket, partial_trace_multi, projector

DEFAULT_DIM_CAP = 4096
ENTROPY_TOL = 1e-9


@dataclass(frozen=True)
class EntropyProfile:
    """``h_cond_a`` bounds Alice's rate and is the q-average of H(rho_beta);
    ``h_cond_b`` bounds Bob's and is the p-average of H(rho_alpha)."""

    h_joint: float
    h_cond_a: float
    h_cond_b: float

    def violations(self, tol: float = ENTROPY_TOL) -> list[str]:
        out = []
        vals = (self.h_joint, self.h_cond_a, self.h_cond_b)
        if not all(np.isfinite(vals)):
            out.append("non-finite entropy")
            return out
        if min(vals) < -tol:
            out.append("negative entropy")
        if self.h_cond_a > self.h_joint + tol:
            out.append("H_A exceeds H(rho)")
        if self.h_cond_b > self.h_joint + tol:
            out.append("H_B exceeds H(rho)")
        if self.h_cond_a + self.h_cond_b < self.h_joint - tol:
            out.append("H_A + H_B below H(rho)")
        return out

    def to_dict(self) -> dict:
        return {"h_joint": self.h_joint, "h_cond_A": self.h_cond_a, "h_cond_B": self.h_cond_b}


def check_distribution(dist) -> np.ndarray:
    dist = np.asarray(dist, dtype=float)
    if dist.ndim != 1 or dist.size == 0:
        raise InvalidDistribution(f"expected a non-empty 1-D probability vector, got shape {dist.shape}")
    if not np.all(np.isfinite(dist)) or np.any(dist < 0):
        raise InvalidDistribution("probabilities must be finite and non-negative")
    if abs(dist.sum() - 1.0) > PROB_TOL:
        raise InvalidDistribution(f"probabilities sum to {dist.sum():.15g}")
    return dist


def _entropy_bits(values: np.ndarray, cutoff: float) -> float:
    v = values[values > cutoff]
    return float(-np.sum(v * np.log2(v))) if v.size else 0.0


def shannon_entropy(dist) -> float:
    return _entropy_bits(check_distribution(dist), 0.0)


def von_neumann_entropy(rho, support_cutoff: float = SUPPORT_CUTOFF) -> float:
    """-tr(rho log2 rho) from the eigenvalues above ``support_cutoff``."""
    return _entropy_bits(eig_hermitian(rho).eigenvalues, support_cutoff)


def conditional_entropies(e: SignalEnsemble) -> EntropyProfile:
    require_valid(e)
    h_joint = von_neumann_entropy(joint_density(e))
    h_beta = np.array([von_neumann_entropy(r) for r in conditional_densities(e, "B")])
    h_alpha = np.array([von_neumann_entropy(r) for r in conditional_densities(e, "A")])
    return EntropyProfile(
        h_joint=h_joint,
        h_cond_a=float(e.q @ h_beta),
        h_cond_b=float(e.p @ h_alpha),
    )


def holevo_information(states, weights) -> float:
    weights = check_distribution(weights)
    states = [np.asarray(s, dtype=complex) for s in states]
    if len(states) != weights.size:
        raise DimensionMismatch(f"{len(states)} states but {weights.size} weights")
    shapes = {s.shape for s in states}
    if len(shapes) != 1:
        raise DimensionMismatch(f"states have differing shapes {sorted(shapes)}")
    avg = sum(w * s for w, s in zip(weights, states))
    return von_neumann_entropy(avg) - float(
        sum(w * von_neumann_entropy(s) for w, s in zip(weights, states) if w > 0)
    )


@dataclass(frozen=True)
class WitnessReport:
    """Entropies of the classically-extended state R(x)S(x)T and its marginals."""

    h_rst: float
    h_rs: float
    h_rt: float
    h_r: float
    h_p: float
    h_q: float
    profile: EntropyProfile
    identity_errors: dict
    ssa_slack: float

    @property
    def identities_hold(self) -> bool:
        return all(abs(v) <= ENTROPY_TOL for v in self.identity_errors.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["profile"] = self.profile.to_dict()
        d["identities_hold"] = self.identities_hold
        return d


def ssa_witness_check(e: SignalEnsemble, dim_cap: int = DEFAULT_DIM_CAP) -> WitnessReport:
    """Build sum p_a q_b |Psi_ab><Psi_ab| (x) |i_a><i_a| (x) |j_b><j_b| densely,
    take its marginals, and compare their entropies with the closed forms
    H(p)+H(q), H(p)+H_B and H(q)+H_A.

    ``ssa_slack`` is H(RS) + H(RT) - H(RST) - H(R), which equals H_A + H_B - H(rho).
    """
    require_valid(e)
    d, na, nb = e.dim, len(e.alphabet_a), len(e.alphabet_b)
    total = d * na * nb
    if total > dim_cap:
        raise DimensionCapExceeded(f"witness dimension {total} exceeds cap {dim_cap}")
    rho_rst = np.zeros((total, total), dtype=complex)
    for i in range(na):
        for j in range(nb):
            block = np.kron(np.kron(projector(e.states[i, j]), projector(ket(i, na))),
                            projector(ket(j, nb)))
            rho_rst += e.p[i] * e.q[j] * block
    dims = (d, na, nb)
    rho_rs = partial_trace_multi(rho_rst, dims, [0, 1])
    rho_rt = partial_trace_multi(rho_rst, dims, [0, 2])
    rho_r = partial_trace_multi(rho_rst, dims, [0])

    h_rst, h_rs, h_rt, h_r = (von_neumann_entropy(m) for m in (rho_rst, rho_rs, rho_rt, rho_r))
    h_p, h_q = shannon_entropy(e.p), shannon_entropy(e.q)
    prof = conditional_entropies(e)
    errors = {
        "rst_minus_hp_hq": h_rst - (h_p + h_q),
        "rs_minus_hp_hb": h_rs - (h_p + prof.h_cond_b),
        "rt_minus_hq_ha": h_rt - (h_q + prof.h_cond_a),
        "r_minus_joint": h_r - prof.h_joint,
    }
    return WitnessReport(
        h_rst=h_rst, h_rs=h_rs, h_rt=h_rt, h_r=h_r, h_p=h_p, h_q=h_q, profile=prof,
        identity_errors=errors, ssa_slack=h_rs + h_rt - h_rst - h_r,
    )
