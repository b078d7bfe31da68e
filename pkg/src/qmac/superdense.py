"""Two senders sharing an entangled pair encode with local unitaries.

The shared state is sum_i c_i |i>|i> with Schmidt amplitudes ``c_i``
(sum c_i^2 = 1). Alice acts on the first factor and Bob on the second; the
resulting N^2-dimensional letter states form an ordinary signal ensemble.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .ensemble import SignalEnsemble
from .entropy import ENTROPY_TOL, EntropyProfile, check_distribution, conditional_entropies, shannon_entropy
from .errors import DimensionMismatch, InvalidState
from .region import contains, pentagon

UNITARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SchmidtState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=float)
        if amps.ndim != 1 or amps.size < 1:
            raise InvalidState("amplitudes must be a non-empty vector")
        if np.any(amps < 0) or not np.all(np.isfinite(amps)):
            raise InvalidState("Schmidt amplitudes must be finite and non-negative")
        if abs(np.sum(amps ** 2) - 1.0) > 1e-12:
            raise InvalidState(f"squared amplitudes sum to {np.sum(amps ** 2):.15g}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return self.amplitudes.size

    def vector(self) -> np.ndarray:
        n = self.n
        psi = np.zeros(n * n, dtype=complex)
        psi[np.arange(n) * (n + 1)] = self.amplitudes
        return psi

    @classmethod
    def bell(cls, n: int = 2) -> "SchmidtState":
        return cls(np.full(n, 1 / np.sqrt(n)))

    @classmethod
    def product(cls, n: int = 2) -> "SchmidtState":
        amps = np.zeros(n)
        amps[0] = 1.0
        return cls(amps)


@dataclass(frozen=True, eq=False)
class UnitaryEnsemble:
    unitaries: list
    weights: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        us = [np.asarray(u, dtype=complex) for u in self.unitaries]
        if not us:
            raise InvalidState("unitary ensemble is empty")
        n = us[0].shape[0]
        for u in us:
            if u.shape != (n, n):
                raise DimensionMismatch("unitaries must share one square shape")
            if np.max(np.abs(u.conj().T @ u - np.eye(n))) > UNITARY_TOL:
                raise InvalidState("matrix is not unitary")
        object.__setattr__(self, "unitaries", us)
        object.__setattr__(self, "weights", check_distribution(self.weights))
        if len(us) != self.weights.size:
            raise DimensionMismatch("one weight per unitary required")
        labels = tuple(self.labels) or tuple(str(i) for i in range(len(us)))
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.unitaries[0].shape[0]

    def subset(self, indices) -> "UnitaryEnsemble":
        idx = list(indices)
        return UnitaryEnsemble([self.unitaries[i] for i in idx], np.full(len(idx), 1 / len(idx)),
                               tuple(self.labels[i] for i in idx))


def entanglement_entropy(s: SchmidtState) -> float:
    return shannon_entropy(s.amplitudes ** 2)


def shift(n: int, a: int = 1) -> np.ndarray:
    """X^a with X|i> = |i+1 mod n>."""
    return np.roll(np.eye(n, dtype=complex), a % n, axis=0)


def clock(n: int, b: int = 1) -> np.ndarray:
    """Z^b with Z|i> = exp(2 pi i i/n) |i>."""
    return np.diag(np.exp(2j * np.pi * b * np.arange(n) / n))


def pauli_ensemble(n: int, include_shifts: bool = True, include_phases: bool = True,
                   full_permutations: bool = False) -> UnitaryEnsemble:
    """Uniform ensemble of X^a Z^b.

    With ``full_permutations`` the shift part runs over all n! permutation
    matrices instead of the n cyclic shifts.
    """
    if n < 1:
        raise InvalidState("n must be at least 1")
    if include_shifts and full_permutations:
        perms = []
        for perm in itertools.permutations(range(n)):
            m = np.zeros((n, n), dtype=complex)
            m[list(perm), range(n)] = 1.0
            perms.append(("P" + "".join(map(str, perm)), m))
    else:
        shifts = range(n) if include_shifts else [0]
        perms = [(f"X{a}", shift(n, a)) for a in shifts]
    phases = range(n) if include_phases else [0]
    us, labels = [], []
    for name, pm in perms:
        for b in phases:
            us.append(pm @ clock(n, b))
            labels.append(f"{name}Z{b}")
    return UnitaryEnsemble(us, np.full(len(us), 1 / len(us)), tuple(labels))


def superdense_ensemble(s: SchmidtState, ens_a: UnitaryEnsemble, ens_b: UnitaryEnsemble) -> SignalEnsemble:
    if not (s.n == ens_a.n == ens_b.n):
        raise DimensionMismatch(f"state dimension {s.n}, ensembles {ens_a.n} and {ens_b.n}")
    psi = s.vector()
    states = np.array([[np.kron(ua, ub) @ psi for ub in ens_b.unitaries] for ua in ens_a.unitaries])
    return SignalEnsemble(ens_a.labels, ens_b.labels, states, ens_a.weights, ens_b.weights)


@dataclass(frozen=True)
class SuperdenseReport:
    n: int
    h_e: float
    profile: EntropyProfile
    sum_bound: float
    alice_bound: float
    bob_bound: float
    alice_corner_in_pentagon: bool

    @property
    def slacks(self) -> dict:
        return {
            "sum": self.sum_bound - self.profile.h_joint,
            "alice": self.alice_bound - self.profile.h_cond_a,
            "bob": self.bob_bound - self.profile.h_cond_b,
        }

    @property
    def bounds_hold(self) -> bool:
        return all(v >= -ENTROPY_TOL for v in self.slacks.values())

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "h_E": self.h_e,
            "profile": self.profile.to_dict(),
            "bounds": {"sum": self.sum_bound, "alice": self.alice_bound, "bob": self.bob_bound},
            "slacks": self.slacks,
            "bounds_hold": self.bounds_hold,
            "alice_corner": [np.log2(self.n) + self.h_e, np.log2(self.n) - self.h_e],
            "alice_corner_in_pentagon": self.alice_corner_in_pentagon,
        }


def superdense_bounds(s: SchmidtState, ens_a: UnitaryEnsemble, ens_b: UnitaryEnsemble) -> SuperdenseReport:
    """Profile of the induced ensemble against H <= 2 log2 N and
    H_A, H_B <= log2 N + H_E."""
    e = superdense_ensemble(s, ens_a, ens_b)
    prof = conditional_entropies(e)
    h_e = entanglement_entropy(s)
    log_n = float(np.log2(s.n))
    corner = (log_n + h_e, log_n - h_e)
    return SuperdenseReport(
        n=s.n, h_e=h_e, profile=prof,
        sum_bound=2 * log_n, alice_bound=log_n + h_e, bob_bound=log_n + h_e,
        alice_corner_in_pentagon=contains(pentagon(prof), corner, 1e-6),
    )
