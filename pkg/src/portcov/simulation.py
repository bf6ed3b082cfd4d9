"""Monte Carlo growth of random plane recursive trees.

Growth law: a node with outdegree ``d`` offers ``d + 1`` gaps among its
children where a newcomer can be inserted, so when the tree has ``m`` nodes
the next node attaches to ``v`` with probability ``(outdeg(v) + 1) / (2m - 1)``.

Sampling uses a position list in which node ``v`` appears ``outdeg(v) + 1``
times. Attaching node ``w`` to ``v`` appends ``v`` and then ``w``, so the list
is ``[0, parent(1), 1, parent(2), 2, ...]``. The parent of ``w`` is the list
entry at a uniform index ``u`` in ``[0, 2w - 1)``: an even ``u`` names node
``u // 2`` directly, an odd ``u`` names the parent of node ``(u + 1) // 2``.
Because the uniform indices do not depend on the tree, a whole batch of trees
is resolved at once by pointer jumping in numpy.

Replicate ``r`` draws its indices from ``numpy.random.Generator(PCG64(base_seed + r))``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .covariance import CovMatrix

__all__ = [
    "GENERATOR",
    "Comparison",
    "EntryVerdict",
    "ExactMoments",
    "SimConfig",
    "SimReport",
    "TreeState",
    "compare_to_theory",
    "exact_small_n",
    "grow_tree",
    "outdegree_census",
    "run_replicates",
]

GENERATOR = "numpy.random.PCG64"
N_BATCHES = 40
MAX_EXACT_NODES = 12

# Upper bound on nodes resolved per vectorized chunk.
_CHUNK_ELEMENTS = 1 << 21


def replicate_rng(base_seed: int, replicate: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(base_seed + replicate))


def _draw_indices(rng: np.random.Generator, n: int) -> np.ndarray:
    # node w (1..n-1) picks a uniform slot in [0, 2w - 1)
    return rng.integers(0, 2 * np.arange(1, n, dtype=np.int64) - 1, dtype=np.int64)


def _resolve_parents(draws: np.ndarray) -> np.ndarray:
    """Parents for a ``(rows, n - 1)`` block of slot indices; column 0 (the root) is -1."""
    rows, m = draws.shape
    n = m + 1
    parents = np.full((rows, n), -1, dtype=np.int64)
    if m == 0:
        return parents
    flat = parents.reshape(-1)
    offset = (np.arange(rows, dtype=np.int64) * n)[:, None]

    even = draws % 2 == 0
    parents[:, 1:] = np.where(even, draws // 2, -1)
    # odd slot: same parent as node (u + 1) // 2, stored as a flat index
    ref = np.zeros((rows, n), dtype=np.int64)
    ref[:, 1:] = (draws + 1) // 2 + offset
    ref = ref.reshape(-1)

    pending = np.flatnonzero(flat < 0)
    pending = pending[pending % n != 0]
    while pending.size:
        target = ref[pending]
        got = flat[target]
        done = got >= 0
        flat[pending[done]] = got[done]
        pending = pending[~done]
        # the target is itself unresolved, so it shares its parent with ref[target]
        ref[pending] = ref[ref[pending]]
    return parents


def _outdegrees(parents: np.ndarray) -> np.ndarray:
    rows, n = parents.shape
    offset = (np.arange(rows, dtype=np.int64) * n)[:, None]
    children = (parents[:, 1:] + offset).reshape(-1)
    return np.bincount(children, minlength=rows * n).reshape(rows, n)


def _census_rows(degrees: np.ndarray, D: int) -> np.ndarray:
    """``(rows, D + 2)`` counts; the last column counts outdegrees above ``D``."""
    rows = degrees.shape[0]
    width = D + 2
    clipped = np.minimum(degrees, D + 1) + (np.arange(rows, dtype=np.int64) * width)[:, None]
    return np.bincount(clipped.reshape(-1), minlength=rows * width).reshape(rows, width)


@dataclass
class TreeState:
    """A grown tree.

    ``outdegree_count[d]`` is the number of nodes with outdegree ``d`` for
    every ``d`` up to the maximum outdegree, and ``position_list`` holds node
    ``v`` exactly ``outdeg(v) + 1`` times.
    """

    n: int
    parents: np.ndarray
    outdegree_count: np.ndarray
    position_list: np.ndarray

    def outdegrees(self) -> np.ndarray:
        return np.bincount(self.parents[1:], minlength=self.n)


def grow_tree(n: int, rng: np.random.Generator) -> TreeState:
    """Grow a random plane recursive tree on ``n`` nodes (root is node 0)."""
    if n < 1:
        raise ValueError(f"tree needs at least one node, got n={n}")
    parents = _resolve_parents(_draw_indices(rng, n)[None, :])[0]
    degrees = np.bincount(parents[1:], minlength=n)
    positions = np.empty(2 * n - 1, dtype=np.int64)
    positions[0] = 0
    positions[1::2] = parents[1:]
    positions[2::2] = np.arange(1, n)
    return TreeState(n, parents, np.bincount(degrees), positions)


def outdegree_census(tree: TreeState, D: int) -> np.ndarray:
    """Counts ``X_0 .. X_D`` of nodes with each outdegree."""
    if D < 0:
        raise ValueError(f"cutoff D must be >= 0, got {D}")
    out = np.zeros(D + 1, dtype=np.int64)
    counts = tree.outdegree_count[: D + 1]
    out[: len(counts)] = counts
    return out


@dataclass(frozen=True)
class SimConfig:
    nodes: int
    replicates: int
    base_seed: int = 0
    max_tracked_outdegree: int = 10

    def __post_init__(self) -> None:
        if self.nodes < 1:
            raise ValueError(f"nodes must be >= 1, got {self.nodes}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if self.max_tracked_outdegree < 0:
            raise ValueError(f"max_tracked_outdegree must be >= 0, got {self.max_tracked_outdegree}")


@dataclass
class BatchStats:
    """Exact sufficient statistics of ``X_0 .. X_D`` over a run of replicates."""

    count: int
    sums: list[int]
    cross: list[list[int]]

    def covariance(self, nodes: int) -> list[list[Fraction]]:
        """Sample covariance (``R - 1`` denominator) divided by ``nodes``, exactly."""
        r = self.count
        if r < 2:
            raise ValueError("covariance needs at least 2 replicates")
        s = self.sums
        return [
            [Fraction(r * self.cross[i][j] - s[i] * s[j], r * (r - 1) * nodes) for j in range(len(s))]
            for i in range(len(s))
        ]

    def means(self) -> list[Fraction]:
        return [Fraction(x, self.count) for x in self.sums]

    @staticmethod
    def merge(parts: list["BatchStats"]) -> "BatchStats":
        size = len(parts[0].sums)
        sums = [sum(p.sums[i] for p in parts) for i in range(size)]
        cross = [[sum(p.cross[i][j] for p in parts) for j in range(size)] for i in range(size)]
        return BatchStats(sum(p.count for p in parts), sums, cross)


@dataclass
class SimReport:
    """Replicate statistics for one :class:`SimConfig`.

    Statistics are kept per batch (replicates are split into up to 40
    contiguous, near-equal batches); totals, covariances and batch-means
    standard errors are derived from them.
    """

    config: SimConfig
    batches: list[BatchStats]
    generator: str = GENERATOR
    comparison: "Comparison | None" = field(default=None, repr=False)

    @property
    def total(self) -> BatchStats:
        return BatchStats.merge(self.batches)

    @property
    def D(self) -> int:
        return self.config.max_tracked_outdegree

    def mean(self) -> np.ndarray:
        return np.array([float(q) for q in self.total.means()])

    def empirical_cov(self) -> np.ndarray:
        """``Cov(X_i, X_j) / n`` over replicates."""
        if self.config.replicates < 2:
            raise ValueError("covariance needs at least 2 replicates")
        return np.array([[float(q) for q in row] for row in self.total.covariance(self.config.nodes)])

    def _batch_se(self, values: list[np.ndarray]) -> np.ndarray:
        if len(values) < 2:
            return np.full(values[0].shape if values else (self.D + 1,), np.nan)
        arr = np.stack(values)
        return arr.std(axis=0, ddof=1) / math.sqrt(len(values))

    def mean_se(self) -> np.ndarray:
        """Standard errors of the means from the spread of batch means."""
        return self._batch_se([np.array([float(q) for q in b.means()]) for b in self.batches])

    def cov_se(self) -> np.ndarray:
        """Standard errors of :meth:`empirical_cov` from the spread of batch covariances."""
        usable = [b for b in self.batches if b.count >= 2]
        if len(usable) < 2:
            return np.full((self.D + 1, self.D + 1), np.nan)
        n = self.config.nodes
        return self._batch_se([np.array(b.covariance(n), dtype=float) for b in usable])

    def to_dict(self) -> dict:
        total = self.total
        out = {
            "config": asdict(self.config),
            "generator": self.generator,
            "n_batches": len(self.batches),
            "statistics": {
                "replicates": total.count,
                "sums": total.sums,
                "cross_sums": total.cross,
                "batches": [asdict(b) for b in self.batches],
            },
            "mean": self.mean().tolist(),
            "mean_se": _nan_to_none(self.mean_se()),
        }
        if self.config.replicates >= 2:
            out["empirical_cov"] = self.empirical_cov().tolist()
            out["cov_se"] = _nan_to_none(self.cov_se())
        if self.comparison is not None:
            out["comparison"] = self.comparison.to_dict()
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(indent=1) + "\n")

    @classmethod
    def from_dict(cls, data: dict) -> "SimReport":
        config = SimConfig(**data["config"])
        batches = [BatchStats(**b) for b in data["statistics"]["batches"]]
        width = config.max_tracked_outdegree + 1
        if sum(b.count for b in batches) != config.replicates or any(
            len(b.sums) != width or len(b.cross) != width for b in batches
        ):
            raise ValueError("report statistics do not match its config")
        return cls(config, batches, data.get("generator", GENERATOR))

    @classmethod
    def load(cls, path: str | Path) -> "SimReport":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _nan_to_none(arr: np.ndarray) -> list:
    return np.where(np.isnan(arr), None, arr).tolist()


def _batch_bounds(replicates: int) -> list[tuple[int, int]]:
    b = min(N_BATCHES, replicates)
    edges = [r * replicates // b for r in range(b + 1)]
    return list(zip(edges[:-1], edges[1:]))


def _run_batch(config: SimConfig, start: int, stop: int) -> BatchStats:
    n, D = config.nodes, config.max_tracked_outdegree
    width = D + 1
    sums = np.zeros(width, dtype=object)
    cross = np.zeros((width, width), dtype=object)
    step = max(1, _CHUNK_ELEMENTS // n)
    for lo in range(start, stop, step):
        hi = min(stop, lo + step)
        draws = np.empty((hi - lo, n - 1), dtype=np.int64)
        for row, r in enumerate(range(lo, hi)):
            draws[row] = _draw_indices(replicate_rng(config.base_seed, r), n)
        X = _census_rows(_outdegrees(_resolve_parents(draws)), D)[:, :width]
        # int64 chunk sums are exact: rows * n**2 stays far below 2**63
        sums += X.sum(axis=0).astype(object)
        cross += (X.T @ X).astype(object)
    return BatchStats(stop - start, [int(v) for v in sums], [[int(v) for v in row] for row in cross])


def run_replicates(config: SimConfig, workers: int = 1) -> SimReport:
    """Grow ``config.replicates`` trees and accumulate outdegree statistics.

    Results are identical for any ``workers``: batches are independent and
    merged in replicate order.
    """
    bounds = _batch_bounds(config.replicates)
    if workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(
                pool.map(_run_batch, [config] * len(bounds), *zip(*bounds))
            )
    else:
        batches = [_run_batch(config, lo, hi) for lo, hi in bounds]
    return SimReport(config, batches)


@dataclass
class ExactMoments:
    n: int
    mean: list[Fraction]
    cov: list[list[Fraction]]
    distribution: dict[tuple[int, ...], Fraction]


def exact_small_n(n: int, D: int) -> ExactMoments:
    """Exact mean and covariance of ``(X_0 .. X_D)`` for a tree on ``n`` nodes.

    Attachment histories are summed exactly. Histories are merged by outdegree
    profile as they grow, which is lossless because the attachment law
    depends on the tree only through its outdegree multiset.
    """
    if not 1 <= n <= MAX_EXACT_NODES:
        raise ValueError(f"exact enumeration supports 1 <= n <= {MAX_EXACT_NODES}, got {n}")
    if D < 0:
        raise ValueError(f"cutoff D must be >= 0, got {D}")
    # profile[d] = number of nodes with outdegree d
    dist: dict[tuple[int, ...], Fraction] = {(1,): Fraction(1)}
    for m in range(1, n):
        total = 2 * m - 1
        nxt: dict[tuple[int, ...], Fraction] = {}
        for profile, p in dist.items():
            for d, c in enumerate(profile):
                if not c:
                    continue
                new = list(profile) + [0]
                new[d] -= 1
                new[d + 1] += 1
                new[0] += 1
                while new[-1] == 0:
                    new.pop()
                key = tuple(new)
                nxt[key] = nxt.get(key, Fraction(0)) + p * Fraction(c * (d + 1), total)
        dist = nxt

    def counts(profile):
        return [profile[d] if d < len(profile) else 0 for d in range(D + 1)]

    mean = [Fraction(0)] * (D + 1)
    second = [[Fraction(0)] * (D + 1) for _ in range(D + 1)]
    for profile, p in dist.items():
        x = counts(profile)
        for i in range(D + 1):
            mean[i] += p * x[i]
            for j in range(D + 1):
                second[i][j] += p * x[i] * x[j]
    cov = [[second[i][j] - mean[i] * mean[j] for j in range(D + 1)] for i in range(D + 1)]
    return ExactMoments(n, mean, cov, dist)


@dataclass(frozen=True)
class EntryVerdict:
    i: int
    j: int
    empirical: float
    theory: float
    deviation: float
    se: float
    band: float
    passed: bool


@dataclass
class Comparison:
    z: float
    abs_floor: float
    entries: list[EntryVerdict]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "z": self.z,
            "abs_floor": self.abs_floor,
            "passed": self.passed,
            "entries": [asdict(e) for e in self.entries],
        }


def compare_to_theory(
    report: SimReport, theory: CovMatrix, z: float = 4.0, abs_floor: float = 0.01
) -> Comparison:
    """Check each ``empirical_cov[i][j]`` for ``i, j <= theory.max_index`` against ``sigma(i, j)``.

    An entry passes when its absolute deviation is at most
    ``max(abs_floor, z * SE)``.
    """
    K = theory.max_index
    if K > report.D:
        raise ValueError(
            f"theory indices 0..{K} exceed the report's census range 0..{report.D}"
        )
    emp = report.empirical_cov()
    se = report.cov_se()
    entries = []
    for i in range(K + 1):
        for j in range(K + 1):
            target = float(theory.entry(i, j))
            dev = abs(float(emp[i, j]) - target)
            s = float(se[i, j])
            band = max(abs_floor, z * s) if not math.isnan(s) else abs_floor
            entries.append(EntryVerdict(i, j, float(emp[i, j]), target, dev, s, band, dev <= band))
    comparison = Comparison(z, abs_floor, entries)
    report.comparison = comparison
    return comparison
