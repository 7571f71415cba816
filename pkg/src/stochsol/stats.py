"""Monte Carlo aggregation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Estimate:
    """Sample mean with its standard error and tail diagnostics.

    ``kurtosis`` is the excess kurtosis of the samples; large values flag the
    heavy-tailed functionals typical of supercritical branching trees.
    """

    mean: float
    stderr: float
    n_samples: int
    n_truncated: int = 0
    n_nonfinite: int = 0
    max_abs: float = 0.0
    kurtosis: float = 0.0

    def zscore(self, other: "Estimate") -> float:
        combined = combined_stderr(self, other)
        diff = abs(self.mean - other.mean)
        if combined == 0.0:
            return 0.0 if diff == 0.0 else float("inf")
        return diff / combined


def combined_stderr(*estimates: Estimate) -> float:
    return float(np.sqrt(sum(e.stderr**2 for e in estimates)))


def summarize(values, truncated=None) -> Estimate:
    """Reduce per-sample values, given in sample order, to an :class:`Estimate`.

    ``np.sum`` performs pairwise summation over a contiguous array, so the
    result depends only on the values and their order.
    """
    v = np.ascontiguousarray(values, dtype=np.float64)
    n = v.size
    if n < 2:
        raise ValueError("need at least 2 samples for a standard error")
    finite = np.isfinite(v)
    n_nonfinite = int(n - np.count_nonzero(finite))
    with np.errstate(invalid="ignore", over="ignore"):
        # a constant sample is returned exactly, without sum/n rounding
        mean = float(v[0]) if np.all(v == v[0]) else float(np.sum(v) / n)
        centred = v - mean
        m2 = float(np.sum(centred * centred) / n)
        var = m2 * n / (n - 1)
        stderr = float(np.sqrt(var / n))
        if m2 > 0.0 and np.isfinite(m2):
            # standardize first so tiny variances do not underflow m2**2
            z = centred / np.sqrt(m2)
            kurt = float(np.sum(z**4) / n - 3.0)
        else:
            kurt = 0.0
    max_abs = float(np.max(np.abs(v[finite]))) if n_nonfinite < n else float("nan")
    n_trunc = 0 if truncated is None else int(np.count_nonzero(truncated))
    return Estimate(
        mean=mean,
        stderr=stderr,
        n_samples=n,
        n_truncated=n_trunc,
        n_nonfinite=n_nonfinite,
        max_abs=max_abs,
        kurtosis=kurt,
    )
