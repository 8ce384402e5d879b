"""Real Jordan structure of small dense operators under floating-point noise.

Eigenvalues are clustered by gap, and the block sizes of each cluster are read
off the rank sequence ``r_k = rank((M - lambda I)^k)``: the number of blocks of
size at least ``k`` is ``r_{k-1} - r_k``.  Ranks are decided from singular
values relative to ``tol_rank * s^k`` where ``s`` is the operator scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

TOL_EIG = 1e-6
TOL_RANK = 1e-8
# a singular value within this factor of the rank threshold makes the decision uncertain
UNCERTAIN_FACTOR = 10.0


@dataclass(frozen=True)
class JordanEntry:
    re: float
    im: float
    blocks: tuple[int, ...]

    @property
    def pair(self) -> bool:
        return self.im > 0

    @property
    def size(self) -> int:
        return sum(self.blocks) * (2 if self.pair else 1)

    def to_json(self) -> dict:
        return {"re": self.re, "im": self.im, "blocks": list(self.blocks)}


@dataclass(frozen=True)
class JordanType:
    """Multiset of ``(eigenvalue, block sizes)``; conjugate pairs stored once with ``im > 0``."""

    entries: tuple[JordanEntry, ...]
    dim: int
    scale: float = 1.0
    uncertain: bool = False
    # hints for degeneracy search: per entry, the rank sequence r_0..r_K used
    ranks: tuple[tuple[int, ...], ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        total = sum(e.size for e in self.entries)
        if total != self.dim:
            raise ValueError(f"block sizes sum to {total}, expected {self.dim}")

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.entries]

    @classmethod
    def from_json(cls, data, scale: float = 1.0) -> "JordanType":
        entries = tuple(JordanEntry(float(d["re"]), float(d["im"]), tuple(d["blocks"])) for d in data)
        return cls(_canonical(entries), sum(e.size for e in entries), scale)

    def blocks_at(self, value: complex = 0.0, tol: float = TOL_EIG) -> tuple[int, ...]:
        for e in self.entries:
            if abs(complex(e.re, e.im) - value) <= tol * max(self.scale, 1e-300):
                return e.blocks
        return ()

    def __str__(self) -> str:
        parts = []
        for e in self.entries:
            lam = f"{e.re:.6g}" if not e.pair else f"{e.re:.6g}±{e.im:.6g}i"
            parts.append(f"{lam}:{list(e.blocks)}")
        return "{" + ", ".join(parts) + "}" + (" (uncertain)" if self.uncertain else "")


def _round(x: float, scale: float = 1.0) -> float:
    """Round to 12 digits below ``scale`` so tiny operators keep their eigenvalue pattern."""
    digits = 12 - int(np.floor(np.log10(scale))) if scale > 0 else 12
    v = float(np.round(x, max(digits, 12)))
    return 0.0 if v == 0 else v


def _canonical(entries) -> tuple[JordanEntry, ...]:
    merged: dict[tuple[float, float], list[int]] = {}
    for e in entries:
        merged.setdefault((e.re, e.im), []).extend(e.blocks)
    out = [JordanEntry(re, im, tuple(sorted(b, reverse=True))) for (re, im), b in merged.items()]
    return tuple(sorted(out, key=lambda e: (e.re, e.im, e.blocks)))


def operator_norm(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, 2)) if M.size else 0.0


def numerical_rank(N: np.ndarray, threshold: float) -> tuple[int, bool, np.ndarray]:
    """``(rank, uncertain, singular values)`` with singular values above ``threshold`` counted."""
    sv = np.linalg.svd(N, compute_uv=False)
    rank = int(np.sum(sv > threshold))
    uncertain = bool(np.any((sv > threshold / UNCERTAIN_FACTOR) & (sv < threshold * UNCERTAIN_FACTOR)))
    return rank, uncertain, sv


def rank_sequence(M, lam: complex, s: float, tol_rank: float, kmax: int, target_nullity: int | None = None):
    """Ranks ``r_0..r_k`` of ``(M - lam I)^k``, stopping once the nullity stabilizes.

    Returns ``(ranks, uncertain)``.
    """
    n = M.shape[0]
    N = M - lam * np.eye(n)
    ranks = [n]
    uncertain = False
    P = np.eye(n, dtype=N.dtype)
    for k in range(1, kmax + 1):
        P = P @ N
        r, unc, _ = numerical_rank(P, tol_rank * s**k)
        uncertain |= unc
        ranks.append(r)
        if r == ranks[-2] or (target_nullity is not None and n - r >= target_nullity) or r == 0:
            break
    return ranks, uncertain


def blocks_from_ranks(ranks: list[int]) -> tuple[tuple[int, ...], bool]:
    """Block sizes (descending) and whether the sequence was consistent."""
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    ok = all(a >= 0 for a in at_least) and all(at_least[k] >= at_least[k + 1] for k in range(len(at_least) - 1))
    blocks = []
    for k in range(len(at_least)):
        nxt = at_least[k + 1] if k + 1 < len(at_least) else 0
        blocks += [k + 1] * max(at_least[k] - nxt, 0)
    return tuple(sorted(blocks, reverse=True)), ok


def _cluster(values: np.ndarray, radius: float) -> list[list[int]]:
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: (np.mean(values[g]).real, np.mean(values[g]).imag))


def jordan_type(
    M,
    tol_eig: float = TOL_EIG,
    tol_rank: float = TOL_RANK,
    *,
    scale: float | None = None,
    nilpotent: bool = False,
) -> JordanType:
    """Jordan type of a real square matrix.

    ``scale`` is a floor for the operator scale, so that an operator which is
    small relative to its natural size (e.g. built from a vanishing curvature
    contraction) is recognized as zero.  With ``nilpotent=True`` only the rank
    filtration at 0 is computed and no eigensolve is performed.
    """
    M = np.asarray(getattr(M, "matrix", M), dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("jordan_type needs a square matrix")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    n = M.shape[0]
    s = max(operator_norm(M), scale or 0.0)
    if s == 0.0:
        return JordanType((JordanEntry(0.0, 0.0, (1,) * n),), n, 0.0, False, ((n, 0),))

    if nilpotent:
        ranks, unc = rank_sequence(M, 0.0, s, tol_rank, n, target_nullity=n)
        blocks, ok = blocks_from_ranks(ranks)
        unc |= not ok or sum(blocks) != n
        if sum(blocks) != n:
            # not nilpotent after all; report what the filtration saw plus a remainder marker
            return jordan_type(M, tol_eig, tol_rank, scale=scale, nilpotent=False)
        return JordanType((JordanEntry(0.0, 0.0, blocks),), n, s, unc, (tuple(ranks),))

    ev = np.linalg.eigvals(M)
    clusters = _merge_until_consistent(M, ev, s, tol_eig, tol_rank)
    entries = []
    ranks_all = []
    uncertain = _gap_too_close(ev, clusters, tol_eig * s)
    done_conj: set[int] = set()
    centers = [complex(np.mean(ev[c])) for c in clusters]
    # upper half-plane clusters claim their partners before the lower ones are visited
    order = sorted(range(len(clusters)), key=lambda i: centers[i].imag <= tol_eig * s)
    for ci in order:
        idx, mu = clusters[ci], centers[ci]
        if ci in done_conj:
            continue
        if abs(mu.imag) <= tol_eig * s:
            mu = complex(mu.real, 0.0)
        elif mu.imag < 0:
            # conjugate partner missing
            uncertain = True
            mu = complex(mu.real, 0.0)
        pair = mu.imag > 0
        if pair:
            partner = _conjugate_partner(ci, centers, clusters, tol_eig * s, positive=False, skip=done_conj)
            if partner is None:
                uncertain = True
                mu, pair = complex(mu.real, 0.0), False
            else:
                done_conj.add(partner)
        ranks, unc = rank_sequence(M, mu if pair else mu.real, s, tol_rank, len(idx), target_nullity=len(idx))
        blocks, ok = blocks_from_ranks(ranks)
        uncertain |= unc or not ok or sum(blocks) != len(idx)
        if sum(blocks) != len(idx):
            blocks = (1,) * len(idx)
        entries.append(JordanEntry(_round(mu.real, s), _round(mu.imag, s) if pair else 0.0, blocks))
        ranks_all.append(tuple(ranks))
    order = sorted(range(len(entries)), key=lambda i: (entries[i].re, entries[i].im, entries[i].blocks))
    entries = [entries[i] for i in order]
    ranks_all = [ranks_all[i] for i in order]
    canon = _canonical(entries)
    if len(canon) != len(entries):
        # distinct clusters rounded onto one eigenvalue; rank hints no longer line up
        uncertain, ranks_all = True, []
    return JordanType(canon, n, s, uncertain, tuple(ranks_all))


def _gap_too_close(ev, clusters, radius) -> bool:
    """Two separate clusters within ``UNCERTAIN_FACTOR`` of the merge radius."""
    centers = [complex(np.mean(ev[c])) for c in clusters]
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            d = abs(centers[i] - centers[j])
            if 0 < d < UNCERTAIN_FACTOR * radius:
                return True
    return False


def _conjugate_partner(ci, centers, clusters, tol, positive: bool, skip=()):
    target = centers[ci].conjugate()
    best, dist = None, np.inf
    for cj, c in enumerate(centers):
        if cj == ci or cj in skip or (c.imag > 0) != positive:
            continue
        d = abs(c - target)
        if d < dist and len(clusters[cj]) == len(clusters[ci]):
            best, dist = cj, d
    return best if dist <= max(tol, 1e-300) * 10 else None


def _generalized_nullity_ok(M, ev, members, s, tol_rank, radius) -> bool:
    mu = complex(np.mean(ev[members]))
    lam = mu.real if abs(mu.imag) <= radius else mu
    # stabilized generalized nullity: a lone point of a split ring sees the whole ring
    ranks, _ = rank_sequence(M, lam, s, tol_rank, M.shape[0])
    return M.shape[0] - ranks[-1] == len(members)


def _merge_until_consistent(M, ev, s, tol_eig, tol_rank, max_radius: float = 1e-2):
    """Cluster eigenvalues by gap, then merge nearest clusters while the result stays consistent.

    Round-off splits a defective eigenvalue of block size ``k`` into a ring of
    radius ~ eps^(1/k).  Radii growing by factors of 10 are tried first; failing
    that, two clusters are merged when ``(M - mu I)^c`` with
    ``mu`` the merged mean has nullity equal to the merged count ``c``.
    """
    radius = tol_eig * s
    # whole rings first: the smallest single-linkage radius at which every cluster is consistent
    r = radius
    while r <= max_radius * s:
        clusters = _cluster(ev, r)
        if all(_generalized_nullity_ok(M, ev, c, s, tol_rank, radius) for c in clusters):
            return _merge_defective(M, ev, clusters, s, tol_rank, radius, max_radius)
        r *= 10.0
    clusters = _cluster(ev, radius)
    merged_any = True
    while merged_any and len(clusters) > 1:
        merged_any = False
        centers = [np.mean(ev[c]) for c in clusters]
        pairs = sorted(
            (abs(centers[i] - centers[j]), i, j)
            for i in range(len(clusters))
            for j in range(i + 1, len(clusters))
            if abs(centers[i] - centers[j]) <= max_radius * s
        )
        for _, i, j in pairs:
            cand = sorted(clusters[i] + clusters[j])
            if _generalized_nullity_ok(M, ev, cand, s, tol_rank, radius):
                clusters = [c for k, c in enumerate(clusters) if k not in (i, j)] + [cand]
                clusters.sort(key=lambda g: (np.mean(ev[g]).real, np.mean(ev[g]).imag))
                merged_any = True
                break
    return _merge_defective(M, ev, clusters, s, tol_rank, radius, max_radius)


def _defective_at(M, ev, members, s, tol_rank, radius) -> bool:
    mu = complex(np.mean(ev[members]))
    lam = mu.real if abs(mu.imag) <= radius else mu
    ranks, _ = rank_sequence(M, lam, s, tol_rank, len(members), target_nullity=len(members))
    blocks, ok = blocks_from_ranks(ranks)
    return ok and sum(blocks) == len(members) and max(blocks) > 1 and ranks[1] < M.shape[0]


def _merge_defective(M, ev, clusters, s, tol_rank, radius, max_radius):
    """Merge split clusters whose union shows a consistent nontrivial block.

    Noise ``e`` splits a ``k``-block into eigenvalues ``e^(1/k)`` apart, which can
    exceed the gap radius while the rank filtration at the mean still sees the
    block.  Distinct eigenvalues fail that test: their union has no rank drop at
    ``k = 1``, or drops out of order.
    """
    clusters = [list(c) for c in clusters]
    while len(clusters) > 1:
        centers = [complex(np.mean(ev[c])) for c in clusters]
        pairs = sorted((abs(centers[i] - centers[j]), i, j) for i in range(len(clusters))
                       for j in range(i + 1, len(clusters)) if abs(centers[i] - centers[j]) <= max_radius * s)
        for _, i, j in pairs:
            cand = sorted(clusters[i] + clusters[j])
            if _defective_at(M, ev, cand, s, tol_rank, radius):
                clusters = [c for k, c in enumerate(clusters) if k not in (i, j)] + [cand]
                clusters.sort(key=lambda g: (np.mean(ev[g]).real, np.mean(ev[g]).imag))
                break
        else:
            break
    return clusters


def nilpotency_index(M, tol_rank: float = TOL_RANK, *, scale: float | None = None) -> int | None:
    """Smallest ``k`` with ``||M^k|| <= tol * s^k``; ``None`` when ``M`` is not nilpotent."""
    M = np.asarray(getattr(M, "matrix", M), dtype=float)
    n = M.shape[0]
    s = max(operator_norm(M), scale or 0.0)
    if s == 0.0:
        return 1
    P = np.eye(n)
    for k in range(1, n + 1):
        P = P @ M
        if operator_norm(P) <= tol_rank * s**k:
            return k
    return None


def same_type(t1: JordanType, t2: JordanType, tol_eig: float = TOL_EIG) -> bool:
    """Equal block multisets under an optimal eigenvalue matching within ``tol_eig``."""
    if t1.dim != t2.dim or len(t1.entries) != len(t2.entries):
        return False
    scale = max(t1.scale, t2.scale, 1e-300)
    a, b = t1.entries, t2.entries
    cost = np.full((len(a), len(b)), 1e300)
    for i, e in enumerate(a):
        for j, f in enumerate(b):
            if e.blocks == f.blocks and e.pair == f.pair:
                cost[i, j] = abs(complex(e.re, e.im) - complex(f.re, f.im))
    rows, cols = linear_sum_assignment(cost)
    return bool(np.all(cost[rows, cols] <= tol_eig * scale))


def negated(t: JordanType) -> JordanType:
    """Jordan type of ``-M`` given that of ``M``."""
    entries = tuple(JordanEntry(_round(-e.re, t.scale), e.im, e.blocks) for e in t.entries)
    return JordanType(_canonical(entries), t.dim, t.scale, t.uncertain, ())


def dumps(t: JordanType) -> str:
    return json.dumps(t.to_json(), sort_keys=True)


# -- planted structures (oracle for tests and benchmarks) ------------------------------


def real_jordan_block(lam: complex, size: int) -> np.ndarray:
    """Real Jordan block: ``J_size(lam)`` for real ``lam``, the doubled real form for a pair."""
    if lam.imag == 0:
        return lam.real * np.eye(size) + np.eye(size, k=1)
    a, b = lam.real, abs(lam.imag)
    C = np.array([[a, -b], [b, a]])
    out = np.kron(np.eye(size), C) + np.kron(np.eye(size, k=1), np.eye(2))
    return out


def _block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def planted_example(rng: np.random.Generator, max_dim: int = 8, max_cond: float = 100.0):
    """Random ``S J S^-1`` with known real Jordan form ``J`` and ``cond(S) < max_cond``.

    Eigenvalues are drawn from a well-separated set (integers in ``[-2, 2]`` and the
    pairs ``a +- i``, ``a +- 2i``), block sizes at most 3.
    """
    choices = [complex(x, 0) for x in range(-2, 3)] + [complex(a, b) for a in (-1, 0, 1) for b in (1, 2)]
    while True:
        picks = rng.choice(len(choices), size=rng.integers(1, 4), replace=False)
        entries, blocks, n = [], [], 0
        for i in picks:
            lam = choices[i]
            mult = 2 if lam.imag else 1
            sizes = sorted((int(k) for k in rng.integers(1, 4, size=rng.integers(1, 3))), reverse=True)
            entries.append(JordanEntry(lam.real, lam.imag, tuple(sizes)))
            blocks += [real_jordan_block(lam, k) for k in sizes]
            n += mult * sum(sizes)
        if n <= max_dim:
            break
    J = _block_diag(blocks)
    while True:
        S = rng.standard_normal((n, n))
        if np.linalg.cond(S) < max_cond:
            break
    M = S @ J @ np.linalg.inv(S)
    return M, JordanType(_canonical(entries), n)
