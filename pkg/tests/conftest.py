import math
from dataclasses import dataclass

import numpy as np
import pytest

from chernoffdp.distributions import TAIL_SCALES, LaplaceDistribution


@dataclass(frozen=True)
class LaplaceMixture:
    """w * Lap(a, s) + (1 - w) * Lap(c, s); a test double for the Density protocol."""

    w: float
    a: float
    c: float
    s: float = 1.0

    def log_eval(self, x):
        la = math.log(self.w) - math.log(2 * self.s) - abs(x - self.a) / self.s
        lc = math.log1p(-self.w) - math.log(2 * self.s) - abs(x - self.c) / self.s
        return float(np.logaddexp(la, lc))

    def eval(self, x):
        return math.exp(self.log_eval(x))

    def support(self):
        return (-math.inf, math.inf)

    def kink_points(self):
        return sorted({self.a, self.c})

    def integration_range(self):
        return (min(self.a, self.c) - TAIL_SCALES * self.s, max(self.a, self.c) + TAIL_SCALES * self.s)

    def sample(self, rng, size=None):
        pick = rng.random(size) < self.w
        base = LaplaceDistribution(0.0, self.s).sample(rng, size)
        return np.where(pick, self.a, self.c) + base


def mixture_epsilon(p: LaplaceMixture, q: LaplaceMixture) -> float:
    """Exact sup |log p/q| for two mixtures sharing components.

    p/q = (w1 r + 1 - w1) / (w2 r + 1 - w2) with r = Lap(a)/Lap(c), which is
    monotone in r, and r ranges over [exp(-|c-a|/s), exp(|c-a|/s)].
    """
    d = abs(p.c - p.a) / p.s
    vals = []
    for r in (math.exp(-d), math.exp(d)):
        vals.append(abs(math.log((p.w * r + 1 - p.w) / (q.w * r + 1 - q.w))))
    return max(vals)


@pytest.fixture
def std_pair():
    return LaplaceDistribution(0.0, 1.0), LaplaceDistribution(1.0, 1.0)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
