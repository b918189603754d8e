"""Serializable verification records.

Every check, stochastic or exact, flattens to the same JSON object so
downstream tooling can treat a verification run as a table.  Stochastic
checks report the usual (estimate, stderr, z-score against the target);
deterministic checks reuse the shape with stderr = 0 and the z slot
carrying error / tolerance.
"""

import dataclasses
import hashlib
import json
import math
import os

__all__ = ["CheckReport", "spec_digest", "write_report"]


def spec_digest(payload):
    """Stable 12-hex-digit digest of a JSON-compatible payload."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _clean(x):
    """JSON has no inf/nan; encode them as strings so reports stay loadable."""
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


@dataclasses.dataclass(frozen=True)
class CheckReport:
    """One verification outcome.

    z_re / z_im hold the standardized discrepancy for Monte Carlo checks
    and error / tolerance for exact ones; past |3| (stochastic) or |1|
    (exact) the check failed.
    """

    check_name: str
    n: int
    spec_digest: str
    estimate_re: float
    estimate_im: float
    stderr_re: float
    stderr_im: float
    target_re: float
    target_im: float
    z_re: float
    z_im: float
    samples: int
    steps: int
    seed: int
    wall_ms: float

    @classmethod
    def from_estimate(cls, name, *, n, payload, estimate, target,
                      steps, seed, wall_ms):
        zr, zi = estimate.z_scores(target)
        target = complex(target)
        return cls(
            check_name=str(name),
            n=int(n),
            spec_digest=spec_digest(payload),
            estimate_re=float(estimate.mean.real),
            estimate_im=float(estimate.mean.imag),
            stderr_re=float(estimate.stderr_re),
            stderr_im=float(estimate.stderr_im),
            target_re=float(target.real),
            target_im=float(target.imag),
            z_re=float(zr),
            z_im=float(zi),
            samples=int(estimate.count),
            steps=int(steps),
            seed=int(seed),
            wall_ms=float(wall_ms),
        )

    @classmethod
    def from_exact(cls, name, *, n, payload, value, target, tol, wall_ms):
        value = complex(value)
        target = complex(target)
        return cls(
            check_name=str(name),
            n=int(n),
            spec_digest=spec_digest(payload),
            estimate_re=float(value.real),
            estimate_im=float(value.imag),
            stderr_re=0.0,
            stderr_im=0.0,
            target_re=float(target.real),
            target_im=float(target.imag),
            z_re=float((value.real - target.real) / tol),
            z_im=float((value.imag - target.imag) / tol),
            samples=0,
            steps=0,
            seed=0,
            wall_ms=float(wall_ms),
        )

    def max_abs_z(self):
        return max(abs(self.z_re), abs(self.z_im))

    def passed(self, z_limit=3.0):
        return (
            math.isfinite(self.z_re)
            and math.isfinite(self.z_im)
            and self.max_abs_z() <= z_limit
        )

    def to_dict(self):
        return {k: _clean(v) for k, v in dataclasses.asdict(self).items()}


def write_report(report, directory):
    """Write one report as <check_name>.json under directory; returns path."""
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"{report.check_name}.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
