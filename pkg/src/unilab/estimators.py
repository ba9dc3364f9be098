"""Monte Carlo estimation against the closed-form targets.

Every estimator here is deterministic given (seed, n): the work is sharded
over a fixed number of substreams no matter how many worker threads execute
them, and the per-stream moments are merged in stream order.  Running with
``threads=1`` and ``threads=8`` therefore produces bit-identical results.
"""

import dataclasses
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .analytic import (
    ABSJ_MAX,
    b3_q_integrals,
    cdf_absj,
    mean_entropy_mu,
    mean_generalized_entropy_b3,
    mean_generalized_entropy_mu,
    q_moments,
)
from .analytic import volume_ratio as _volume_ratio
from .core import Q_CLASS_TOL, entropy_values, generalized_entropy_values, q_values
from .sampling import DEFAULT_SEED, MeasureSpec, RngStream, sample_b, sample_haar_unitary
from .unitary import jarlskog_values

#: number of substreams the sample budget is sharded over; fixed so that
#: the thread count never changes which stream produces which samples
N_SUBSTREAMS = 64

_SIMPLE_STATS = ("Q", "J2", "entropy", "indicator_Q_nonneg")


@dataclass(frozen=True)
class Statistic:
    """A per-sample scalar whose mean the estimators target.

    Plain statistics are Q, J2, entropy and the Q >= 0 indicator;
    generalized_entropy carries its order q and indicator_absj_leq carries
    the |J| threshold.
    """

    name: str
    param: Optional[float] = None

    def __post_init__(self) -> None:
        if self.name in _SIMPLE_STATS:
            if self.param is not None:
                raise ValueError(f"statistic {self.name!r} takes no parameter")
        elif self.name == "generalized_entropy":
            if self.param is None or not float(self.param) >= 0.0:
                raise ValueError("generalized_entropy needs an order q >= 0")
            object.__setattr__(self, "param", float(self.param))
        elif self.name == "indicator_absj_leq":
            if self.param is None or not 0.0 <= float(self.param) <= ABSJ_MAX:
                raise ValueError(
                    f"indicator_absj_leq needs a threshold in [0, {ABSJ_MAX:.17g}]"
                )
            object.__setattr__(self, "param", float(self.param))
        else:
            raise ValueError(f"unknown statistic {self.name!r}")

    @classmethod
    def q(cls) -> "Statistic":
        return cls("Q")

    @classmethod
    def j2(cls) -> "Statistic":
        return cls("J2")

    @classmethod
    def entropy(cls) -> "Statistic":
        return cls("entropy")

    @classmethod
    def generalized_entropy(cls, q: float) -> "Statistic":
        return cls("generalized_entropy", q)

    @classmethod
    def indicator_q_nonneg(cls) -> "Statistic":
        return cls("indicator_Q_nonneg")

    @classmethod
    def indicator_absj_leq(cls, y: float) -> "Statistic":
        return cls("indicator_absj_leq", y)

    @property
    def is_indicator(self) -> bool:
        return self.name.startswith("indicator")

    @property
    def label(self) -> str:
        if self.name == "generalized_entropy":
            return f"S_q[q={self.param:g}]"
        if self.name == "indicator_absj_leq":
            return f"P[|J|<={self.param:g}]"
        return {
            "Q": "Q",
            "J2": "J2",
            "entropy": "S",
            "indicator_Q_nonneg": "P[Q>=0]",
        }[self.name]


@dataclass(frozen=True)
class EstimateResult:
    """A Monte Carlo estimate next to its analytic target, when one exists.

    z_score is (estimate - reference)/std_error; a degenerate estimate with
    zero spread scores 0 when it hits the reference exactly.
    """

    name: str
    estimate: float
    std_error: float
    n_samples: int
    seed: int
    reference: Optional[float] = None
    z_score: Optional[float] = None

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Right-continuous step CDF of a sample, for KS comparisons."""

    sorted_values: np.ndarray
    n: int

    def __post_init__(self) -> None:
        v = np.asarray(self.sorted_values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("need a nonempty 1-d sample")
        if (np.diff(v) < 0).any():
            raise ValueError("values must be sorted ascending")
        if int(self.n) != v.size:
            raise ValueError(f"n = {self.n} does not match {v.size} values")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "sorted_values", v)
        object.__setattr__(self, "n", v.size)

    @classmethod
    def from_samples(cls, values) -> "EmpiricalCdf":
        v = np.sort(np.asarray(values, dtype=float).ravel())
        return cls(v, v.size)

    def __call__(self, x):
        idx = np.searchsorted(self.sorted_values, x, side="right")
        out = idx / self.n
        return float(out) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# deterministic sharding and reduction


def _resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        env = os.environ.get("UNILAB_THREADS", "").strip()
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise ValueError(f"UNILAB_THREADS must be an integer, got {env!r}") from None
        else:
            threads = os.cpu_count() or 1
    threads = int(threads)
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    return min(threads, N_SUBSTREAMS)


def _shard_counts(n: int) -> list:
    base, rem = divmod(n, N_SUBSTREAMS)
    return [base + (1 if i < rem else 0) for i in range(N_SUBSTREAMS)]


def _moments_of(values: np.ndarray):
    """(count, mean, sum of squared deviations) of a 1-d array."""
    count = values.size
    if count == 0:
        return 0, 0.0, 0.0
    mean = float(values.mean())
    return count, mean, float(np.square(values - mean).sum())


def _merge_moments(parts):
    """Fold per-stream (count, mean, M2) triples in the given order."""
    count, mean, m2 = 0, 0.0, 0.0
    for c2, mean2, m22 in parts:
        if c2 == 0:
            continue
        if count == 0:
            count, mean, m2 = c2, mean2, m22
            continue
        total = count + c2
        delta = mean2 - mean
        mean += delta * (c2 / total)
        m2 += m22 + delta * delta * (count * c2 / total)
        count = total
    return count, mean, m2


def _map_streams(work: Callable, streams, counts, threads: int) -> list:
    jobs = [(st, c) for st, c in zip(streams, counts) if c > 0]
    if threads == 1 or len(jobs) == 1:
        return [work(st, c) for st, c in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # executor.map returns results in submission order, which is stream
        # order, so the reduction below never depends on scheduling
        return list(pool.map(lambda job: work(*job), jobs))


def _sample_statistic(measure: MeasureSpec, stat: Statistic, stream: RngStream, count: int):
    if measure.kind == "haar" and stat.name in ("J2", "indicator_absj_leq"):
        # with the unitary in hand, use the imaginary part directly
        j = jarlskog_values(sample_haar_unitary(stream, count))
        if stat.name == "J2":
            return j * j
        return (np.abs(j) <= stat.param).astype(float)
    b = sample_b(measure, stream, count)
    if stat.name == "Q":
        return q_values(b)
    if stat.name == "J2":
        return q_values(b) / 4.0
    if stat.name == "entropy":
        return entropy_values(b)
    if stat.name == "generalized_entropy":
        return generalized_entropy_values(b, stat.param)
    if stat.name == "indicator_Q_nonneg":
        # counted down to the classifier tolerance so that rounding at the
        # boundary of the sampled set does not register as misses
        return (q_values(b) >= -Q_CLASS_TOL).astype(float)
    absj = 0.5 * np.sqrt(np.clip(q_values(b), 0.0, None))
    return (absj <= stat.param).astype(float)


def _reference_for(measure: MeasureSpec, stat: Statistic) -> Optional[float]:
    if measure.kind == "flat":
        if stat.name == "Q":
            return b3_q_integrals()[0]
        if stat.name == "entropy":
            return mean_generalized_entropy_b3(1.0)
        if stat.name == "generalized_entropy":
            return mean_generalized_entropy_b3(stat.param)
        if stat.name == "indicator_Q_nonneg":
            return _volume_ratio()
        return None
    k = 1.0 if measure.kind == "haar" else measure.k
    if stat.name == "Q":
        return q_moments(k, 1)
    if stat.name == "J2":
        return q_moments(k, 1) / 4.0
    if stat.name == "entropy":
        return mean_entropy_mu(k)
    if stat.name == "generalized_entropy":
        return mean_generalized_entropy_mu(k, stat.param)
    if stat.name == "indicator_Q_nonneg":
        return 1.0
    return cdf_absj(k, stat.param).value


def _zscore(estimate: float, std_error: float, reference: Optional[float]) -> Optional[float]:
    if reference is None:
        return None
    if std_error == 0.0:
        if estimate == reference:
            return 0.0
        return math.copysign(math.inf, estimate - reference)
    return (estimate - reference) / std_error


def estimate_mean(
    measure: MeasureSpec,
    statistic: Statistic,
    n: int,
    seed: int = DEFAULT_SEED,
    threads: Optional[int] = None,
) -> EstimateResult:
    """Sample mean of the statistic under the measure, with standard error.

    The reference field carries the matching closed form when one is known
    (volume ratio for the Q >= 0 indicator under the flat measure, moment
    and entropy formulas under mu_k, CDF values for |J| thresholds); pairs
    without a closed form simply leave it absent.

    Indicator statistics report the exact Bernoulli standard error
    sqrt(p(1-p)/n), which stays meaningful for very small p.
    """
    n = int(n)
    if n < 100:
        raise ValueError(f"need n >= 100 samples for a standard error, got {n}")
    threads = _resolve_threads(threads)
    root = RngStream(seed)
    parts = _map_streams(
        lambda st, c: _moments_of(_sample_statistic(measure, statistic, st, c)),
        root.split(N_SUBSTREAMS),
        _shard_counts(n),
        threads,
    )
    count, mean, m2 = _merge_moments(parts)
    if statistic.is_indicator:
        std_error = math.sqrt(mean * (1.0 - mean) / count)
    else:
        std_error = math.sqrt(m2 / (count - 1) / count)
    reference = _reference_for(measure, statistic)
    return EstimateResult(
        name=f"{measure.label}:{statistic.label}",
        estimate=mean,
        std_error=std_error,
        n_samples=count,
        seed=root.seed,
        reference=reference,
        z_score=_zscore(mean, std_error, reference),
    )


def moment_suite(
    k: float,
    n_max: int,
    samples: int,
    seed: int = DEFAULT_SEED,
    threads: Optional[int] = None,
) -> tuple:
    """MC moments <Q^n> under mu_k against their closed forms, n = 0..n_max.

    All powers are taken over one shared set of samples.  The n = 0 row is
    the trivial normalization check: exactly 1 with zero spread.
    """
    n_max = int(n_max)
    if not 1 <= n_max <= 4:
        raise ValueError(f"n_max must be between 1 and 4, got {n_max}")
    samples = int(samples)
    if samples < 100:
        raise ValueError(f"need at least 100 samples, got {samples}")
    measure = MeasureSpec.mu(k)
    threads = _resolve_threads(threads)
    root = RngStream(seed)

    def work(stream, count):
        qv = q_values(sample_b(measure, stream, count))
        return [_moments_of(qv**power) for power in range(1, n_max + 1)]

    parts = _map_streams(work, root.split(N_SUBSTREAMS), _shard_counts(samples), threads)
    results = [
        EstimateResult(
            name=f"{measure.label}:Q^0",
            estimate=1.0,
            std_error=0.0,
            n_samples=samples,
            seed=root.seed,
            reference=1.0,
            z_score=0.0,
        )
    ]
    for power in range(1, n_max + 1):
        count, mean, m2 = _merge_moments(part[power - 1] for part in parts)
        std_error = math.sqrt(m2 / (count - 1) / count)
        reference = q_moments(measure.k, power)
        results.append(
            EstimateResult(
                name=f"{measure.label}:Q^{power}",
                estimate=mean,
                std_error=std_error,
                n_samples=count,
                seed=root.seed,
                reference=reference,
                z_score=_zscore(mean, std_error, reference),
            )
        )
    return tuple(results)


def ks_distance(samples: EmpiricalCdf, analytic_cdf: Callable[[float], float]) -> float:
    """Two-sided Kolmogorov-Smirnov distance of a sample from a model CDF.

    Takes the larger of the two one-sided gaps at every sample point.  The
    callable may be vectorized (an array of sorted values is tried first)
    or plain scalar.
    """
    if samples.n < 1000:
        raise ValueError(f"need at least 1000 samples for a stable distance, got {samples.n}")
    v = samples.sorted_values
    try:
        f = np.asarray(analytic_cdf(v), dtype=float)
        if f.shape != v.shape:
            raise TypeError("not vectorized")
    except (TypeError, ValueError):
        f = np.array([float(analytic_cdf(x)) for x in v])
    steps = np.arange(samples.n + 1) / samples.n
    d_plus = float((steps[1:] - f).max())
    d_minus = float((f - steps[:-1]).max())
    return max(d_plus, d_minus)
