"""Desk-scale timing of the two wavefunction-evaluation routes.

Compares, at fixed double precision, the cost of evaluating the degree-n
coordinate eigenfunction psi_n(x) (three-term recurrence, O(n) work) with
the cost of the holomorphic monomial z^n/sqrt(n!) evaluated as
exp(n log z) times a cached normalizer (n-independent work).  Wall-clock
medians of batch means stand in for any abstract cost model; nothing
asymptotic is claimed, only boundedness of one route and growth of the
other over the measured range.

Normalizers are cached as exp(-lgamma(n+1)/2); they underflow to zero
past n ~ 300, which changes the evaluated value but not the timing.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field


@dataclass
class BenchReport:
    """Per-degree mean evaluation times (seconds) for both routes."""

    n_values: list[int]
    monomial_mean: list[float]
    hermite_mean: list[float]
    monomial_var: list[float]
    hermite_var: list[float]
    repetitions: int
    point: complex
    ratio: list[float] = field(init=False)

    def __post_init__(self):
        if self.repetitions < 1000:
            raise ValueError("need at least 1000 repetitions per degree")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValueError("degrees must be strictly increasing")
        self.ratio = [h / m if m > 0 else math.inf
                      for m, h in zip(self.monomial_mean, self.hermite_mean)]

    def monomial_spread(self):
        """max/min of the monomial timings (boundedness figure of merit)."""
        return max(self.monomial_mean) / min(self.monomial_mean)

    def hermite_slope(self):
        """Least-squares slope of Hermite time vs degree (s per unit n)."""
        n = len(self.n_values)
        mx = sum(self.n_values) / n
        my = sum(self.hermite_mean) / n
        sxx = sum((v - mx) ** 2 for v in self.n_values)
        sxy = sum((v - mx) * (t - my) for v, t in zip(self.n_values, self.hermite_mean))
        return sxy / sxx

    def to_dict(self):
        return {
            "repetitions": self.repetitions,
            "point": {"re": self.point.real, "im": self.point.imag},
            "n": list(self.n_values),
            "monomial_mean_s": list(self.monomial_mean),
            "monomial_var_s2": list(self.monomial_var),
            "hermite_mean_s": list(self.hermite_mean),
            "hermite_var_s2": list(self.hermite_var),
            "hermite_over_monomial": list(self.ratio),
            "monomial_spread": self.monomial_spread(),
            "hermite_slope_s_per_n": self.hermite_slope(),
        }


def monomial_value(n, z, inv_norm):
    """z^n / sqrt(n!) via exp(n log z) and a cached normalizer: the work is
    independent of n."""
    return cmath.exp(n * cmath.log(z)) * inv_norm[n]


def hermite_value(n, x):
    """psi_n(x) by the normalized recurrence: O(n) multiply-adds."""
    h_prev = 0.0
    h = math.pi ** -0.25 * math.exp(-0.5 * x * x)
    for k in range(n):
        h, h_prev = x * math.sqrt(2.0 / (k + 1)) * h - math.sqrt(k / (k + 1.0)) * h_prev, h
    return h


def _time_call(func, reps, batches=16, warmup=64):
    for _ in range(warmup):
        func()
    per_batch = max(reps // batches, 1)
    means = []
    for _ in range(batches):
        t0 = time.perf_counter()
        for _ in range(per_batch):
            func()
        means.append((time.perf_counter() - t0) / per_batch)
    means.sort()
    mid = len(means) // 2
    median = means[mid] if len(means) % 2 else 0.5 * (means[mid - 1] + means[mid])
    mean = sum(means) / len(means)
    var = sum((m - mean) ** 2 for m in means) / len(means)
    return median, var


def default_degrees(n_max):
    degrees = sorted({1, 2, 4, 8, 16, 32, 64, 128, 192, 256, 384, 512, int(n_max)})
    return [n for n in degrees if 1 <= n <= n_max]


def run_bench(n_max=512, reps=2000, point=0.7 + 0.4j, n_values=None):
    """Time both evaluation routes at each degree; ``reps`` evaluations per
    degree (>= 1000), median-of-batch-means reporting."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    degrees = list(n_values) if n_values is not None else default_degrees(n_max)
    inv_norm = [math.exp(-0.5 * math.lgamma(n + 1)) for n in range(max(degrees) + 1)]
    x = abs(point)
    mono_mean, mono_var, herm_mean, herm_var = [], [], [], []
    for n in degrees:
        m, v = _time_call(lambda: monomial_value(n, point, inv_norm), reps)
        mono_mean.append(m)
        mono_var.append(v)
        m, v = _time_call(lambda: hermite_value(n, x), reps)
        herm_mean.append(m)
        herm_var.append(v)
    return BenchReport(degrees, mono_mean, herm_mean, mono_var, herm_var,
                       repetitions=int(reps), point=complex(point))
