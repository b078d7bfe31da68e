"""Achievable rate regions: per-distribution pentagons, their convex hull
over sampled product distributions, and time sharing."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .ensemble import SignalEnsemble, require_valid
from .entropy import EntropyProfile, check_distribution
from .errors import InvalidProfile, InvalidSamplerPlan, LambdaOutOfRange

COLLINEAR_TOL = 1e-12
MAX_GRID_PAIRS = 250_000


class RatePair(NamedTuple):
    r1: float
    r2: float


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points, tol: float = COLLINEAR_TOL) -> np.ndarray:
    """Monotone-chain hull, counterclockwise, collinear points dropped.

    Coordinates are first snapped to a grid of spacing ``tol``; otherwise two
    x values one ulp apart can make a vertical edge look slanted and drop a
    genuine corner.
    """
    arr = np.asarray(points, dtype=float).reshape(-1, 2)
    snapped = np.round(arr / tol) * tol
    merged = []
    for p in sorted({(float(x), float(y)) for x, y in snapped}):
        # neighbouring grid points still count as duplicates
        k = len(merged) - 1
        dup = False
        while k >= 0 and p[0] - merged[k][0] <= 1.5 * tol:
            if abs(p[1] - merged[k][1]) <= 1.5 * tol:
                dup = True
                break
            k -= 1
        if not dup:
            merged.append(p)
    if len(merged) <= 2:
        return np.array(merged, dtype=float).reshape(-1, 2)

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= tol:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(merged)
    upper = half(reversed(merged))
    hull = lower[:-1] + upper[:-1]
    return np.array(hull, dtype=float).reshape(-1, 2)


@dataclass(frozen=True, eq=False)
class RateRegion:
    """Closed convex polygon; vertices counterclockwise starting at (0, 0)."""

    vertices: np.ndarray

    @classmethod
    def from_points(cls, points) -> "RateRegion":
        hull = convex_hull(np.vstack([np.zeros((1, 2)), np.asarray(points, float).reshape(-1, 2)]))
        start = int(np.argmin(np.linalg.norm(hull, axis=1)))
        return cls(np.roll(hull, -start, axis=0))

    def pairs(self) -> list[RatePair]:
        return [RatePair(float(x), float(y)) for x, y in self.vertices]

    def area(self) -> float:
        v = self.vertices
        if len(v) < 3:
            return 0.0
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def max_sum_vertices(self, tol: float = 1e-9) -> np.ndarray:
        s = self.vertices.sum(axis=1)
        return self.vertices[s >= s.max() - tol]

    def violations(self) -> list[str]:
        v = self.vertices
        out = []
        if len(v) == 0:
            return ["empty region"]
        if np.any(v < -COLLINEAR_TOL) or not np.all(np.isfinite(v)):
            out.append("vertex outside the non-negative quadrant")
        if np.linalg.norm(v[0]) > COLLINEAR_TOL:
            out.append("first vertex is not the origin")
        n = len(v)
        for i in range(n):
            for j in range(i + 1, n):
                if np.max(np.abs(v[i] - v[j])) <= COLLINEAR_TOL:
                    out.append(f"duplicate vertices {i} and {j}")
        if n >= 3:
            for i in range(n):
                e1 = v[(i + 1) % n] - v[i]
                e2 = v[(i + 2) % n] - v[(i + 1) % n]
                if e1[0] * e2[1] - e1[1] * e2[0] < -COLLINEAR_TOL:
                    out.append(f"reflex turn at vertex {(i + 1) % n}")
        return out

    def to_dict(self) -> dict:
        return {"vertices": [[float(x), float(y)] for x, y in self.vertices], "area": self.area()}


def pentagon(profile: EntropyProfile) -> RateRegion:
    """Closure of {R1 <= H_A, R2 <= H_B, R1 + R2 <= H(rho)} with coincident
    corners merged (a rectangle when the sum constraint is slack)."""
    bad = profile.violations()
    if bad:
        raise InvalidProfile("; ".join(bad))
    h = profile.h_joint
    ha = max(profile.h_cond_a, 0.0)
    hb = max(profile.h_cond_b, 0.0)
    pts = [
        (0.0, 0.0),
        (ha, 0.0),
        (ha, max(h - ha, 0.0)),
        (max(h - hb, 0.0), hb),
        (0.0, hb),
    ]
    return RateRegion.from_points(pts)


def contains(region: RateRegion, rate, tol: float = 1e-9) -> bool:
    """Membership in the polygon with every edge constraint relaxed by ``tol``."""
    r = np.asarray(rate, dtype=float)
    v = region.vertices
    if len(v) == 1:
        return bool(np.linalg.norm(r - v[0]) <= tol)
    if len(v) == 2:
        a, b = v
        ab = b - a
        t = np.clip(np.dot(r - a, ab) / np.dot(ab, ab), 0.0, 1.0)
        return bool(np.linalg.norm(r - (a + t * ab)) <= tol)
    n = len(v)
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        edge = b - a
        # signed distance to the left of the edge (inside for CCW order)
        if _cross(a, b, r) / np.linalg.norm(edge) < -tol:
            return False
    return True


def time_share(a, b, lam: float) -> RatePair:
    if not 0.0 <= lam <= 1.0:
        raise LambdaOutOfRange(f"lambda={lam} is outside [0, 1]")
    return RatePair(lam * a[0] + (1 - lam) * b[0], lam * a[1] + (1 - lam) * b[1])


# --- union over product distributions ---------------------------------------

@dataclass(frozen=True)
class SamplerPlan:
    """Which product distributions (p, q) to evaluate.

    ``grid_step`` spaces a lattice on each probability simplex (1/step must be
    an integer); ``random_samples`` flat-Dirichlet pairs are added from
    ``seed``; ``extra`` holds explicit (p, q) pairs.
    """

    grid_step: float | None = 0.05
    random_samples: int = 0
    seed: int | None = None
    extra: tuple = field(default_factory=tuple)


def simplex_grid(k: int, step: float) -> np.ndarray:
    n = round(1.0 / step)
    if n < 1 or abs(n * step - 1.0) > 1e-9:
        raise InvalidSamplerPlan(f"grid_step={step} does not divide 1 evenly")
    rows = []
    # stars and bars: bar positions among n + k - 1 slots
    for bars in itertools.combinations(range(n + k - 1), k - 1):
        edges = (-1,) + bars + (n + k - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(k)])
    return np.array(rows, dtype=float) / n


def sample_distributions(e: SignalEnsemble, plan: SamplerPlan):
    """Return (P, Q) arrays of shape (pairs, |A|) and (pairs, |B|)."""
    na, nb = len(e.alphabet_a), len(e.alphabet_b)
    ps, qs = [], []
    if plan.grid_step is not None:
        if plan.grid_step <= 0 or plan.grid_step > 1:
            raise InvalidSamplerPlan(f"grid_step={plan.grid_step} must be in (0, 1]")
        gp, gq = simplex_grid(na, plan.grid_step), simplex_grid(nb, plan.grid_step)
        if len(gp) * len(gq) > MAX_GRID_PAIRS:
            raise InvalidSamplerPlan(
                f"grid has {len(gp) * len(gq)} distribution pairs (limit {MAX_GRID_PAIRS})"
            )
        ps.append(np.repeat(gp, len(gq), axis=0))
        qs.append(np.tile(gq, (len(gp), 1)))
    if plan.random_samples < 0:
        raise InvalidSamplerPlan("random_samples must be non-negative")
    if plan.random_samples:
        if plan.seed is None:
            raise InvalidSamplerPlan("random samples need a seed")
        rng = np.random.Generator(np.random.PCG64(plan.seed))
        ps.append(rng.dirichlet(np.ones(na), size=plan.random_samples))
        qs.append(rng.dirichlet(np.ones(nb), size=plan.random_samples))
    for p, q in plan.extra:
        ps.append(check_distribution(p).reshape(1, na))
        qs.append(check_distribution(q).reshape(1, nb))
    if not ps:
        raise InvalidSamplerPlan("sampler plan selects no distributions")
    return np.vstack(ps), np.vstack(qs)


def _batch_entropy(mats: np.ndarray, cutoff: float = 1e-12) -> np.ndarray:
    w = np.linalg.eigvalsh(mats)
    safe = np.where(w > cutoff, w, 1.0)
    return -np.sum(np.where(w > cutoff, w * np.log2(safe), 0.0), axis=-1)


def batch_profiles(e: SignalEnsemble, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Entropy profiles for many (p, q) pairs at once.

    Returns an array of shape (pairs, 3) with columns (H, H_A, H_B). rho_alpha
    depends only on q and rho_beta only on p, so those are diagonalised once
    per distinct distribution; the joint state needs one batched eigvalsh.
    """
    s = e.states
    outer = np.einsum("abk,abl->abkl", s, s.conj())  # (|A|, |B|, d, d)
    rho_beta = np.einsum("na,abkl->nbkl", P, outer)
    h_beta = _batch_entropy(rho_beta)  # (pairs, |B|)
    rho_alpha = np.einsum("nb,abkl->nakl", Q, outer)
    h_alpha = _batch_entropy(rho_alpha)  # (pairs, |A|)
    rho = np.einsum("nb,nbkl->nkl", Q, rho_beta)
    h = _batch_entropy(rho)
    h_a = np.einsum("nb,nb->n", Q, h_beta)
    h_b = np.einsum("na,na->n", P, h_alpha)
    return np.column_stack([h, h_a, h_b])


def pentagon_points(profiles: np.ndarray) -> np.ndarray:
    h, ha, hb = np.maximum(profiles, 0.0).T
    z = np.zeros_like(h)
    pts = np.stack(
        [
            np.column_stack([ha, z]),
            np.column_stack([ha, np.maximum(h - ha, 0.0)]),
            np.column_stack([np.maximum(h - hb, 0.0), hb]),
            np.column_stack([z, hb]),
        ],
        axis=1,
    )
    return pts.reshape(-1, 2)


def region_union(e: SignalEnsemble, plan: SamplerPlan) -> RateRegion:
    """Convex hull of the pentagons of every distribution in ``plan``."""
    require_valid(e)
    P, Q = sample_distributions(e, plan)
    return RateRegion.from_points(pentagon_points(batch_profiles(e, P, Q)))


def hull_convergence(e: SignalEnsemble, plan: SamplerPlan) -> list[dict]:
    """Hull area on a ladder of coarser grids up to ``plan``.

    The union is not certified; this shows how much the area still moves as
    the sample set grows. Each entry holds ``grid_step``, ``random_samples``,
    ``pairs`` and ``area``.
    """
    require_valid(e)
    ladder = []
    if plan.grid_step is not None:
        n = round(1.0 / plan.grid_step)
        for m in sorted({k for k in (1, 2, 4, 5, 10, 20, 40, 100) if k < n and n % k == 0} | {n}):
            ladder.append(SamplerPlan(1.0 / m, 0, None))
    if plan.random_samples:
        ladder.append(SamplerPlan(plan.grid_step, plan.random_samples, plan.seed))
    if plan.extra:
        ladder.append(plan)
    out = []
    for step in ladder:
        P, Q = sample_distributions(e, step)
        area = RateRegion.from_points(pentagon_points(batch_profiles(e, P, Q))).area()
        out.append({"grid_step": step.grid_step, "random_samples": step.random_samples,
                    "pairs": int(len(P)), "area": area})
    return out
