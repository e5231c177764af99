"""Classical reference results: exact chain distribution, Monte Carlo transport,
distribution metrics and the query-scaling experiment."""
from __future__ import annotations

import math
import os
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import estimation as est
from .errors import ValidationError
from .physics import StepSchedule, as_schedule
from .seeding import derive_seed
from .walk import DepthDistribution, build_walk, outcome_labels


def exact_chain_distribution(schedule) -> DepthDistribution:
    """``absorbed[k] = p_k prod_{j<k} (1 - p_j)``, ``survived = prod (1 - p_j)``."""
    p = as_schedule(schedule).as_array()
    reach = np.concatenate(([1.0], np.cumprod(1.0 - p)))
    return DepthDistribution(reach[:-1] * p, reach[-1])


@dataclass(frozen=True)
class McConfig:
    schedule: StepSchedule
    shots: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "schedule", as_schedule(self.schedule))
        if self.shots < 1:
            raise ValidationError(f"shots must be >= 1, got {self.shots}")


def mc_transport(config: McConfig) -> DepthDistribution:
    """Empirical absorb-or-advance distribution from ``config.shots`` photons.

    Every photon still in flight at step ``k`` draws one uniform number and is
    absorbed there when it falls below ``p_k``.
    """
    rng = np.random.default_rng(config.seed)
    alive = config.shots
    absorbed = np.zeros(len(config.schedule), dtype=np.int64)
    for k, p in enumerate(config.schedule):
        if alive == 0:
            break
        hits = int(np.count_nonzero(rng.random(alive) < p))
        absorbed[k] = hits
        alive -= hits
    return DepthDistribution(absorbed / config.shots, alive / config.shots)


def _as_vector(dist) -> np.ndarray:
    if isinstance(dist, DepthDistribution):
        return dist.as_array()
    return np.asarray(dist, dtype=float)


def _pair(p, q):
    p, q = _as_vector(p), _as_vector(q)
    if p.shape != q.shape:
        raise ValidationError(f"outcome spaces differ: {p.shape} vs {q.shape}")
    return p, q


def mse(p, q) -> float:
    p, q = _pair(p, q)
    return float(np.mean((p - q) ** 2))


def kl_divergence(p, q) -> float:
    """``sum p ln(p/q)``; ``inf`` when ``q`` vanishes somewhere ``p`` does not."""
    p, q = _pair(p, q)
    support = p > 0
    if np.any(q[support] <= 0):
        return math.inf
    return float(np.sum(p[support] * np.log(p[support] / q[support])))


@dataclass
class ComparisonReport:
    mse: float
    kl_divergence: float
    kl_reverse: float
    bins: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"mse": self.mse, "kl_divergence": self.kl_divergence,
                "kl_reverse": self.kl_reverse, "bins": self.bins}


def compare(p, q, labels: Optional[Sequence[str]] = None) -> ComparisonReport:
    """Metrics of ``p`` against reference ``q``; ``kl_divergence`` is ``KL(p || q)``."""
    p, q = _pair(p, q)
    labels = list(labels) if labels is not None else outcome_labels(p.size - 1)
    bins = [{"outcome_label": lab, "p": float(a), "q": float(b), "squared_error": float((a - b) ** 2)}
            for lab, a, b in zip(labels, p, q)]
    return ComparisonReport(mse(p, q), kl_divergence(p, q), kl_divergence(q, p), bins)


_AGGREGATES = {"median": np.median, "mean": np.mean}


def fit_loglog_slope(rows: Iterable, aggregate: str = "median") -> float:
    """Least-squares slope of ``log(abs_error)`` against ``log(oracle_queries)``.

    ``rows`` are mappings with ``oracle_queries`` and ``abs_error`` (or
    ``(queries, error)`` pairs).  Rows sharing an ``epsilon`` key, or the same
    query count when there is none, are first reduced by ``aggregate``
    (``"median"`` or ``"mean"``) on both axes.
    """
    if aggregate not in _AGGREGATES:
        raise ValidationError(f"aggregate must be one of {sorted(_AGGREGATES)}, got {aggregate!r}")
    reduce = _AGGREGATES[aggregate]
    groups = defaultdict(lambda: ([], []))
    for row in rows:
        if isinstance(row, dict):
            n, e = row["oracle_queries"], row["abs_error"]
            key = row.get("epsilon", n)
        else:
            n, e = row
            key = n
        if not (n > 0 and e > 0):
            raise ValidationError(f"log-log fit needs positive values, got ({n}, {e})")
        groups[key][0].append(float(n))
        groups[key][1].append(float(e))
    if len(groups) < 3:
        raise ValidationError(f"need at least 3 budgets to fit a slope, got {len(groups)}")
    x = np.log([reduce(ns) for ns, _ in groups.values()])
    y = np.log([reduce(es) for _, es in groups.values()])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


SCALING_EPSILONS = (0.05, 0.02, 0.01, 0.005, 0.002)


def scaling_experiment(schedule, epsilons: Sequence[float] = SCALING_EPSILONS,
                       replications: int = 20, seed: int = 0, threshold: Optional[int] = None,
                       config: est.IqaeConfig = est.IqaeConfig(),
                       classical_replications: Optional[int] = None,
                       workers: Optional[int] = None) -> list:
    """Absolute estimation error against query budget for IQAE and plain sampling.

    For each epsilon, IQAE runs ``replications`` times.  The classical
    estimator then draws ``n`` photons per run through :func:`mc_transport`,
    with ``n`` the median IQAE query count at that epsilon, and reports the
    error of the surviving fraction.  ``classical_replications`` defaults to
    ten times ``replications``.  IQAE replications run on ``workers`` threads
    (default: the ``QWMC_THREADS`` environment variable, else 1); rows come out
    in the same order either way.
    """
    for eps in epsilons:
        if not 0 < eps < 0.5:
            raise ValidationError(f"epsilon must lie in (0, 0.5), got {eps}")
    schedule = as_schedule(schedule)
    classical_replications = classical_replications or 10 * replications
    walk = build_walk(schedule)
    good = est.survival_predicate(walk, threshold)
    sampler = est.GroverSampler(walk, good)
    exact = est.exact_amplitude(walk, good)
    depth = len(schedule) if threshold is None else threshold
    prefix = StepSchedule(schedule.probabilities[:depth])

    workers = workers or int(os.environ.get("QWMC_THREADS", "1"))

    rows = []
    for i, eps in enumerate(epsilons):
        cfg = est.IqaeConfig(epsilon=eps, alpha=config.alpha,
                             shots_per_round=config.shots_per_round,
                             max_rounds=config.max_rounds, min_ratio=config.min_ratio)
        seeds = [derive_seed(seed, "iqae", i, r) for r in range(replications)]

        def run(s, cfg=cfg):
            return est.iqae(walk, good, cfg, s, sampler=sampler)

        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                results = list(pool.map(run, seeds))
        else:
            results = [run(s) for s in seeds]
        budgets = []
        for s, res in zip(seeds, results):
            budgets.append(res.oracle_queries)
            rows.append({"method": "iqae", "epsilon": eps, "seed": s,
                         "oracle_queries": res.oracle_queries,
                         "abs_error": abs(res.estimate - exact)})
        n = int(np.median(budgets))
        for r in range(classical_replications):
            s = derive_seed(seed, "classical", i, r)
            survived = mc_transport(McConfig(prefix, n, s)).survived
            rows.append({"method": "classical", "epsilon": eps, "seed": s,
                         "oracle_queries": n, "abs_error": abs(survived - exact)})
    return rows


def slopes(rows: Sequence[dict], aggregate: str = "median") -> dict:
    """Fitted slope per ``method`` column value."""
    return {m: fit_loglog_slope((r for r in rows if r["method"] == m), aggregate)
            for m in sorted({r["method"] for r in rows})}
