"""Replication statistics shared by the simulators."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class SimConfig:
    """Run-length and seeding controls for one Monte-Carlo experiment.

    ``horizon`` is per replication, counted in ``unit`` ("events" or
    "seconds"); the first ``warmup`` fraction of it is discarded.
    """

    horizon: float = 100_000
    warmup: float = 0.2
    replications: int = 10
    seed: int = 0
    unit: str = "events"
    n_jobs: int = 1

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon!r}")
        if not 0 <= self.warmup < 1:
            raise ValueError(f"warmup must lie in [0, 1), got {self.warmup!r}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ValueError(f"replications must be an integer >= 1, got {self.replications!r}")
        if self.unit not in ("events", "seconds"):
            raise ValueError(f"unit must be 'events' or 'seconds', got {self.unit!r}")


@dataclass(frozen=True)
class SimEstimate:
    """Mean over replications with a Student-t 95% half-width.

    ``ci_half_width`` is None when there is a single replication.
    """

    point: float
    ci_half_width: float
    replications: int

    @classmethod
    def from_replications(cls, values):
        values = np.asarray(values, dtype=float)
        n = values.size
        point = float(values.mean())
        if n < 2:
            return cls(point, None, 1)
        half = stats.t.ppf(0.975, n - 1) * values.std(ddof=1) / math.sqrt(n)
        return cls(point, float(half), int(n))

    @classmethod
    def from_proportions(cls, successes, trials):
        """Replicated proportion whose half-width is at least the pooled Wilson one.

        The replication t-interval collapses to zero when no replication sees
        an event; the Wilson interval on pooled counts does not.
        """
        successes = np.asarray(successes, dtype=float)
        trials = np.asarray(trials, dtype=float)
        ratios = np.divide(successes, trials, out=np.zeros_like(successes), where=trials > 0)
        est = cls.from_replications(ratios)
        if est.ci_half_width is None:
            return est
        lo, hi = wilson_interval(successes.sum(), trials.sum())
        half = max(est.ci_half_width, est.point - lo, hi - est.point)
        return cls(est.point, float(half), est.replications)

    @property
    def interval(self):
        if self.ci_half_width is None:
            return (self.point, self.point)
        return (self.point - self.ci_half_width, self.point + self.ci_half_width)

    def covers(self, value):
        lo, hi = self.interval
        return lo <= value <= hi


def wilson_interval(successes, trials, z=1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials**2)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def agrees(estimate, reference, rel=0.10, reference_half_width=0.0):
    """True if ``estimate`` is within ``rel`` of ``reference`` or the 95% CIs overlap."""
    if abs(estimate.point - reference) <= rel * abs(reference):
        return True
    if estimate.ci_half_width is None:
        return False
    lo, hi = estimate.interval
    return lo <= reference + reference_half_width and reference - reference_half_width <= hi


class UniformStream:
    """Buffered draws from a numpy Generator for tight Python event loops."""

    def __init__(self, rng, chunk=1 << 15):
        self._rng = rng
        self._chunk = chunk
        self._u = []
        self._e = []

    def uniform(self):
        if not self._u:
            self._u = self._rng.random(self._chunk).tolist()
        return self._u.pop()

    def exponential(self):
        if not self._e:
            self._e = self._rng.standard_exponential(self._chunk).tolist()
        return self._e.pop()
