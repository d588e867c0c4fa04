"""Verification records and tolerance settings shared by all checks."""
import math
from dataclasses import dataclass, field

RECORD_FIELDS = ("theorem", "q", "n", "seed", "closed_form", "numeric_opt",
                 "worst_violation", "trials", "skipped", "pass")


@dataclass(frozen=True)
class Tolerances:
    eq_tol_scale: float = 1e-10
    dir_slack: float = 1e-9
    opt_tol_rel: float = 1e-4

    def eq_tol(self, n, value):
        return self.eq_tol_scale * n * (1 + abs(value))

    def opt_tol(self, value):
        return self.opt_tol_rel * (1 + abs(value))


def _clean(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class VerificationRecord:
    """Outcome of one theorem check.

    ``worst_violation`` is the largest signed amount by which any sampled
    point went the wrong way (negative when every sample kept a margin).
    Equality and oracle errors are kept in ``details`` and also decide
    ``passed``.
    """
    theorem: str
    q: float
    n: int
    seed: int
    closed_form: float = None
    numeric_opt: float = None
    worst_violation: float = -math.inf
    trials: int = 0
    skipped: int = 0
    passed: bool = True
    details: dict = field(default_factory=dict)

    @property
    def fully_skipped(self):
        return self.trials == 0 and self.skipped > 0

    def to_dict(self):
        return {
            "theorem": self.theorem,
            "q": float(self.q),
            "n": int(self.n),
            "seed": int(self.seed),
            "closed_form": _clean(self.closed_form),
            "numeric_opt": _clean(self.numeric_opt),
            "worst_violation": _clean(self.worst_violation),
            "trials": int(self.trials),
            "skipped": int(self.skipped),
            "pass": bool(self.passed),
        }

    @classmethod
    def skipped_cell(cls, theorem, q, n, seed, reason, count=1):
        return cls(theorem, q, n, seed, skipped=count, details={"reason": reason})
