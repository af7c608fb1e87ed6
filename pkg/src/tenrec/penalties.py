"""Scalar nonconvex penalties and their proximity operators.

Each penalty phi is symmetric, concave and nondecreasing on [0, inf)
with phi(0) = 0.  ``value(t, mu)`` evaluates the penalty at level
``mu`` (the regularization weight folded into the standard threshold
parameterisation of each family) and ``prox(mu, v)`` returns a global
minimizer of ``value(|x|, mu) + (x - v)^2 / 2``.

Every closed form below is gated in the test suite by a brute-force
grid search on the objective, which is the ground truth; where two
global minimizers exist (threshold boundaries) the smaller-magnitude
one is returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Penalty",
    "L1",
    "Firm",
    "MCP",
    "SCAD",
    "Lq",
    "CappedLq",
    "LogPenalty",
    "make_penalty",
    "PENALTY_NAMES",
]


class Penalty:
    """Base class; subclasses implement ``value`` and ``_prox_abs``."""

    def value(self, t, mu):
        raise NotImplementedError

    def _prox_abs(self, mu, a):
        """Prox restricted to a >= 0 (applied to magnitudes)."""
        raise NotImplementedError

    def prox(self, mu, v):
        """Global minimizer of ``value(|x|, mu) + 0.5 (x - v)^2``.

        Accepts scalars or arrays; ``mu = 0`` returns ``v`` unchanged.
        The result has the sign of ``v`` (or is 0) and magnitude at most
        ``|v|``.
        """
        v = np.asarray(v, dtype=np.float64)
        scalar = v.ndim == 0
        v = np.atleast_1d(v)
        if mu < 0:
            raise ValueError("prox level mu must be >= 0")
        if mu == 0:
            out = v.copy()
        else:
            out = np.sign(v) * self._prox_abs(float(mu), np.abs(v))
        return float(out[0]) if scalar else out

    def objective(self, x, mu, v):
        return self.value(np.abs(x), mu) + 0.5 * (np.asarray(x) - v) ** 2


@dataclass(frozen=True)
class L1(Penalty):
    """Absolute value; prox is the soft threshold."""

    def value(self, t, mu):
        return mu * np.asarray(t, dtype=np.float64)

    def _prox_abs(self, mu, a):
        return np.maximum(a - mu, 0.0)


class _MinimaxConcave(Penalty):
    """Two-piece concave penalty with unbiased region |v| > gamma * mu."""

    gamma: float

    def value(self, t, mu):
        t = np.asarray(t, dtype=np.float64)
        g = self.gamma
        inner = mu * t - t**2 / (2.0 * g)
        return np.where(t <= g * mu, inner, g * mu**2 / 2.0)

    def _prox_abs(self, mu, a):
        g = self.gamma
        mid = g * (a - mu) / (g - 1.0)
        return np.where(a <= mu, 0.0, np.where(a < g * mu, mid, a))


@dataclass(frozen=True)
class MCP(_MinimaxConcave):
    gamma: float = 2.5

    def __post_init__(self):
        if self.gamma <= 1:
            raise ValueError("MCP requires gamma > 1")


@dataclass(frozen=True)
class Firm(_MinimaxConcave):
    """Firm shrinkage with upper threshold gamma * mu.

    The firm threshold is the prox of the minimax-concave penalty, so
    the penalty value coincides with :class:`MCP` at the same gamma.
    """

    gamma: float = 2.5

    def __post_init__(self):
        if self.gamma <= 1:
            raise ValueError("firm shrinkage requires gamma > 1")


@dataclass(frozen=True)
class SCAD(Penalty):
    a: float = 3.7

    def __post_init__(self):
        if self.a <= 2:
            raise ValueError("SCAD requires a > 2")

    def value(self, t, mu):
        t = np.asarray(t, dtype=np.float64)
        a = self.a
        lin = mu * t
        quad = (2.0 * a * mu * t - t**2 - mu**2) / (2.0 * (a - 1.0))
        cap = mu**2 * (a + 1.0) / 2.0
        return np.where(t <= mu, lin, np.where(t <= a * mu, quad, cap))

    def _prox_abs(self, mu, a_in):
        a = self.a
        soft = np.maximum(a_in - mu, 0.0)
        mid = ((a - 1.0) * a_in - a * mu) / (a - 2.0)
        return np.where(a_in <= 2.0 * mu, soft, np.where(a_in <= a * mu, mid, a_in))


@dataclass(frozen=True)
class Lq(Penalty):
    """Power penalty mu * t**q with q in (0, 1]; q = 1 is the soft threshold.

    For q < 1 the prox is a hard-threshold-like rule: zero below the
    closed-form threshold, otherwise the larger root of
    ``x + mu q x**(q-1) = |v|`` found by Newton iteration (the function
    is increasing and convex on the bracket, so Newton from ``|v|``
    converges monotonically; a bisection fallback covers stalls).
    """

    q: float = 0.5
    newton_iters: int = 50
    newton_tol: float = 1e-12

    def __post_init__(self):
        if not 0 < self.q <= 1:
            raise ValueError("Lq requires q in (0, 1]")

    def value(self, t, mu):
        return mu * np.asarray(t, dtype=np.float64) ** self.q

    def threshold(self, mu):
        q = self.q
        if q == 1.0:
            return mu
        xhat = (2.0 * mu * (1.0 - q)) ** (1.0 / (2.0 - q))
        return xhat + mu * q * xhat ** (q - 1.0)

    def _prox_abs(self, mu, a):
        q = self.q
        if q == 1.0:
            return np.maximum(a - mu, 0.0)
        tau = self.threshold(mu)
        out = np.zeros_like(a)
        live = a > tau
        if np.any(live):
            out[live] = self._newton(mu, a[live])
        return out

    def _newton(self, mu, a):
        q = self.q
        x = a.copy()
        for _ in range(self.newton_iters):
            g = x + mu * q * x ** (q - 1.0) - a
            dg = 1.0 + mu * q * (q - 1.0) * x ** (q - 2.0)
            step = g / dg
            x = np.maximum(x - step, 1e-300)
            if np.max(np.abs(step)) < self.newton_tol:
                break
        else:
            x = self._bisect(mu, a)
        return x

    def _bisect(self, mu, a):
        # fallback: the root lies in (xhat, a); 200 halvings reach ~1e-60
        q = self.q
        lo = np.full_like(a, (2.0 * mu * (1.0 - q)) ** (1.0 / (2.0 - q)))
        hi = a.copy()
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            g = mid + mu * q * mid ** (q - 1.0) - a
            lo = np.where(g < 0, mid, lo)
            hi = np.where(g < 0, hi, mid)
        return 0.5 * (lo + hi)


@dataclass(frozen=True)
class CappedLq(Penalty):
    """Capped power penalty mu * min(t, theta)**q.

    The prox enumerates every candidate stationary point (zero, the
    uncapped power-penalty solution when it falls below the cap, the cap
    boundary itself, and the identity branch beyond the cap) and keeps
    the objective minimizer, preferring smaller magnitude on ties.
    """

    q: float = 0.5
    theta: float = 1.0

    def __post_init__(self):
        if not 0 < self.q <= 1:
            raise ValueError("capped Lq requires q in (0, 1]")
        if self.theta <= 0:
            raise ValueError("capped Lq requires theta > 0")

    def value(self, t, mu):
        return mu * np.minimum(np.asarray(t, dtype=np.float64), self.theta) ** self.q

    def _prox_abs(self, mu, a):
        inner = Lq(q=self.q)._prox_abs(mu, a)
        candidates = [
            np.zeros_like(a),
            np.where(inner < self.theta, inner, 0.0),
            np.full_like(a, self.theta),
            np.where(a > self.theta, a, 0.0),
        ]
        best = candidates[0]
        best_f = self.value(best, mu) + 0.5 * (best - a) ** 2
        for cand in candidates[1:]:
            f = self.value(cand, mu) + 0.5 * (cand - a) ** 2
            take = (f < best_f - 1e-15) | ((np.abs(f - best_f) <= 1e-15) & (cand < best))
            best = np.where(take, cand, best)
            best_f = np.where(take, f, best_f)
        return best


@dataclass(frozen=True)
class LogPenalty(Penalty):
    """Logarithmic penalty mu * log(1 + t / gamma)."""

    gamma: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("log penalty requires gamma > 0")

    def value(self, t, mu):
        return mu * np.log1p(np.asarray(t, dtype=np.float64) / self.gamma)

    def _prox_abs(self, mu, a):
        g = self.gamma
        disc = (a + g) ** 2 - 4.0 * mu
        ok = disc >= 0
        root = np.where(ok, 0.5 * ((a - g) + np.sqrt(np.maximum(disc, 0.0))), 0.0)
        root = np.where(ok & (root > 0), root, 0.0)
        f_root = self.value(root, mu) + 0.5 * (root - a) ** 2
        f_zero = 0.5 * a**2
        return np.where(f_root < f_zero - 1e-15, root, 0.0)


PENALTY_NAMES = ("l1", "firm", "mcp", "scad", "lq", "capped-lq", "log")


def make_penalty(name: str, **params) -> Penalty:
    """Build a penalty from its CLI name and keyword parameters."""
    key = name.lower().replace("_", "-")
    table = {
        "l1": L1,
        "firm": Firm,
        "mcp": MCP,
        "scad": SCAD,
        "lq": Lq,
        "capped-lq": CappedLq,
        "log": LogPenalty,
    }
    if key not in table:
        raise ValueError(f"unknown penalty {name!r}; choose from {PENALTY_NAMES}")
    return table[key](**params)
