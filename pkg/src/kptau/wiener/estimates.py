"""Accumulation of complex Monte Carlo estimates.

RunningMoments keeps exact per-block partial sums (count, sum, sum of
squares, componentwise) so a run can be folded across blocks in a fixed
order: the final estimate is then a pure function of the sample stream,
independent of how many worker threads produced the blocks.
ComplexEstimate is the frozen result with componentwise standard errors.
"""

import dataclasses
import math

import numpy as np


class RunningMoments:
    """Mutable accumulator of complex first and second moments."""

    __slots__ = ("count", "sum_re", "sum_im", "sumsq_re", "sumsq_im")

    def __init__(self):
        self.count = 0
        self.sum_re = 0.0
        self.sum_im = 0.0
        self.sumsq_re = 0.0
        self.sumsq_im = 0.0

    def add_values(self, values):
        """Fold one block of complex (or real) sample values."""
        v = np.asarray(values)
        re = np.ascontiguousarray(v.real, dtype=np.float64)
        im = np.ascontiguousarray(v.imag, dtype=np.float64)
        self.count += int(v.size)
        self.sum_re += float(re.sum())
        self.sum_im += float(im.sum())
        self.sumsq_re += float((re * re).sum())
        self.sumsq_im += float((im * im).sum())

    def merge(self, other):
        """Fold another accumulator (block-ordered reduction)."""
        self.count += other.count
        self.sum_re += other.sum_re
        self.sum_im += other.sum_im
        self.sumsq_re += other.sumsq_re
        self.sumsq_im += other.sumsq_im

    def estimate(self):
        if self.count == 0:
            raise ValueError("no samples accumulated")
        n = self.count
        mean_re = self.sum_re / n
        mean_im = self.sum_im / n

        def se(total_sq, mean):
            if n < 2:
                return math.inf
            var = max(total_sq / n - mean * mean, 0.0) * n / (n - 1)
            return math.sqrt(var / n)

        return ComplexEstimate(
            mean=complex(mean_re, mean_im),
            stderr_re=se(self.sumsq_re, mean_re),
            stderr_im=se(self.sumsq_im, mean_im),
            count=n,
        )


@dataclasses.dataclass(frozen=True)
class ComplexEstimate:
    """Mean of a complex sample with componentwise standard errors."""

    mean: complex
    stderr_re: float
    stderr_im: float
    count: int

    def z_scores(self, target):
        """Componentwise (mean - target) / stderr.

        A zero stderr gives 0.0 on exact agreement and +-inf otherwise,
        so deterministic targets still produce sane output.
        """
        target = complex(target)

        def one(diff, se):
            if se == 0.0:
                return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
            return diff / se

        return (
            one(self.mean.real - target.real, self.stderr_re),
            one(self.mean.imag - target.imag, self.stderr_im),
        )

    def max_abs_z(self, target):
        zr, zi = self.z_scores(target)
        return max(abs(zr), abs(zi))

    def scaled(self, factor):
        """The estimate of factor * X from the estimate of X (exact
        constant, errors scale by |factor| componentwise mix ignored:
        factor must be real)."""
        f = float(factor)
        return ComplexEstimate(
            mean=f * self.mean,
            stderr_re=abs(f) * self.stderr_re,
            stderr_im=abs(f) * self.stderr_im,
            count=self.count,
        )
