"""Tucker sketching: deterministic and randomized mode-wise truncation.

Fixed-rank compression runs a block Krylov iteration per mode (Gaussian
start, powers of A A^T, Rayleigh-Ritz on the orthonormalized Krylov
block); fixed-accuracy compression runs a block Lanczos
bidiagonalization with deflated QR on both sides, one-side full
reorthogonalization and a residual-energy tracker that stops once the
captured energy reaches the requested relative tolerance.  Both update
the shrinking core sequentially, mode by mode.

All randomness flows from a single seed through
``numpy.random.default_rng`` (PCG64) standard-normal draws.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import fold, unfold, mode_product
from .shrink import gnhtsvt
from .transform import DEFAULT_TRANSFORM, Transform

__all__ = [
    "TuckerFactors",
    "SketchConfig",
    "BLBPDiagnostics",
    "defl_qr",
    "sthosvd",
    "rsthosvd_bki",
    "ad_rsthosvd_blbp",
    "local_orthogonality_loss",
    "gnhtsvt_randomized",
]


@dataclass
class TuckerFactors:
    """Core tensor plus per-mode orthonormal factors (None = uncompressed)."""

    core: np.ndarray
    factors: list
    dims: tuple

    def reconstruct(self) -> np.ndarray:
        if any(n == 0 for n in self.core.shape):
            return np.zeros(self.dims)
        out = self.core
        for mode, f in enumerate(self.factors):
            if f is not None:
                out = mode_product(out, f, mode)
        return out

    @property
    def ranks(self) -> tuple:
        return tuple(
            f.shape[1] if f is not None else n
            for f, n in zip(self.factors, self.dims)
        )


@dataclass
class SketchConfig:
    """Parameters for one randomized compression.

    ``mode`` selects fixed-rank (block Krylov) or fixed-accuracy (block
    Lanczos) compression.  ``order`` lists the modes to compress, in
    processing order; omitted modes keep identity factors.
    """

    mode: str = "fixed-rank"
    order: tuple = None
    ranks: tuple = None
    blocks: tuple = None
    krylov: tuple = None
    eps: float = 0.05
    block: int = 10
    defl_tol: float = None
    seed: int = 0

    def validate(self, dims) -> None:
        d = len(dims)
        order = self.resolved_order(dims)
        for k in order:
            if not 0 <= k < d:
                raise ValueError(f"processing order entry {k} out of range")
        if self.mode == "fixed-rank":
            if self.ranks is None:
                raise ValueError("fixed-rank sketching requires target ranks")
            ranks = self._per_order(self.ranks, order, "ranks")
            blocks = self._per_order(self.blocks, order, "blocks") if self.blocks else [
                max(1, int(np.ceil(r / 4))) for r in ranks
            ]
            krylov = self._per_order(self.krylov, order, "krylov") if self.krylov is not None else [4] * len(order)
            for k, r, b, q in zip(order, ranks, blocks, krylov):
                if r > dims[k]:
                    raise ValueError(f"rank {r} exceeds mode-{k} length {dims[k]}")
                if not 1 <= b <= r:
                    raise ValueError(f"block size {b} must satisfy 1 <= b <= r ({r})")
                if (q + 1) * b < r:
                    raise ValueError(
                        f"(q+1)*b = {(q + 1) * b} < rank {r} on mode {k}"
                    )
        elif self.mode == "fixed-accuracy":
            if not 0 < self.eps < 1:
                raise ValueError("eps must lie in (0, 1)")
            if self.block < 1:
                raise ValueError("block size must be >= 1")
            if self.defl_tol is not None and self.defl_tol <= 0:
                raise ValueError("deflation tolerance must be > 0")
        else:
            raise ValueError(f"unknown sketch mode {self.mode!r}")

    def resolved_order(self, dims) -> tuple:
        if self.order is not None:
            return tuple(int(k) for k in self.order)
        return tuple(range(len(dims)))

    @staticmethod
    def _per_order(values, order, name):
        vals = list(values)
        if len(vals) != len(order):
            raise ValueError(f"{name} must provide one entry per processed mode")
        return vals


@dataclass
class BLBPDiagnostics:
    """Per-mode traces of the fixed-accuracy sweep."""

    energy_estimates: dict = field(default_factory=dict)
    ranks: dict = field(default_factory=dict)
    deflations: dict = field(default_factory=dict)
    orth_loss: dict = field(default_factory=dict)
    iterations: dict = field(default_factory=dict)

    @property
    def implied_error(self) -> float:
        """sqrt(sum of per-mode residual energies)."""
        total = sum(max(e, 0.0) for e in self.energy_estimates.values())
        return float(np.sqrt(total))


def defl_qr(a: np.ndarray, tol: float):
    """Deflated pivoted QR: drop trailing columns with |R(i,i)| < tol.

    Returns ``(q, r, s)`` with ``q`` m x s orthonormal, ``r`` s x n such
    that ``a ~= q @ r``; ``s = 0`` (zero-width q) is a valid outcome.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("deflated QR expects a matrix")
    m, n = a.shape
    if n == 0 or m == 0:
        return np.zeros((m, 0)), np.zeros((0, n)), 0
    q, r, piv = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    s = int(np.count_nonzero(diag >= tol))
    r_trim = r[:s, :]
    r_out = np.empty_like(r_trim)
    r_out[:, piv] = r_trim
    return q[:, :s], r_out, s


def _orthonormalize(k: np.ndarray, rank_floor: int, mode: int, strict: bool = True):
    """Basis of a Krylov block via deflated QR plus one reorthogonalization.

    Deflation runs at the floating-point noise floor, so only genuinely
    dependent directions are dropped.  ``strict`` raises when the block
    cannot support the target rank; otherwise the caller degrades to the
    discovered rank.
    """
    scale = np.linalg.norm(k)
    if scale == 0:
        raise ValueError(f"Krylov block is zero on mode {mode}")
    q1, _, s = defl_qr(k, 1e-14 * scale)
    if s < rank_floor and strict:
        raise ValueError(
            f"Krylov block numerically rank deficient on mode {mode}: "
            f"rank {s} < target {rank_floor}"
        )
    q2, _ = np.linalg.qr(q1)
    return q2


def sthosvd(x: np.ndarray, ranks, order=None) -> TuckerFactors:
    """Deterministic sequentially truncated mode-wise SVD baseline."""
    x = np.asarray(x, dtype=np.float64)
    d = x.ndim
    order = tuple(range(d)) if order is None else tuple(order)
    ranks = list(ranks)
    if len(ranks) != len(order):
        raise ValueError("need one rank per processed mode")
    factors = [None] * d
    core = x
    for r, k in zip(ranks, order):
        if not 1 <= r <= x.shape[k]:
            raise ValueError(f"rank {r} out of range for mode {k}")
        a = unfold(core, k)
        u, _, _ = np.linalg.svd(a, full_matrices=False)
        f = u[:, :r]
        factors[k] = f
        dims = list(core.shape)
        dims[k] = r
        core = fold(f.T @ a, k, dims)
    return TuckerFactors(core=core, factors=factors, dims=x.shape)


def rsthosvd_bki(
    x: np.ndarray,
    ranks,
    order=None,
    blocks=None,
    krylov=None,
    seed: int = 0,
    strict_rank: bool = True,
) -> TuckerFactors:
    """Fixed-rank randomized compression via per-mode block Krylov iteration.

    Per processed mode: draw a Gaussian block G, build
    ``[A G, (A A^T) A G, ..., (A A^T)^q A G]`` (each power block scaled
    by its norm, which leaves the span unchanged but avoids overflow at
    large q), orthonormalize, and keep the top eigenvectors of the
    projected Gram matrix.  Deterministic for a fixed seed.
    """
    x = np.asarray(x, dtype=np.float64)
    d = x.ndim
    order = tuple(range(d)) if order is None else tuple(order)
    ranks = list(ranks)
    blocks = [max(1, int(np.ceil(r / 4))) for r in ranks] if blocks is None else list(blocks)
    krylov = [4] * len(order) if krylov is None else list(krylov)
    cfg = SketchConfig(
        mode="fixed-rank", order=order, ranks=tuple(ranks), blocks=tuple(blocks),
        krylov=tuple(krylov), seed=seed,
    )
    cfg.validate(x.shape)
    rng = np.random.default_rng(seed)

    factors = [None] * d
    core = x
    for r, b, q, k in zip(ranks, blocks, krylov, order):
        a = unfold(core, k)
        if np.linalg.norm(a) == 0.0:
            # zero iterates arise inside ADMM; return a rank-0 structure
            factors[k] = np.zeros((a.shape[0], 0))
            dims = list(core.shape)
            dims[k] = 0
            core = fold(np.zeros((0, a.shape[1])), k, dims)
            continue
        n = a.shape[1]
        g = rng.standard_normal((n, b))
        blk = a @ g
        pieces = []
        for _ in range(q + 1):
            scale = np.linalg.norm(blk)
            pieces.append(blk / scale if scale > 0 else blk)
            blk = a @ (a.T @ pieces[-1])
        z = _orthonormalize(np.hstack(pieces), r, k, strict=strict_rank)
        r_eff = min(r, z.shape[1])
        w = a.T @ z
        m = w.T @ w
        _, vecs = np.linalg.eigh(m)
        f = z @ vecs[:, -r_eff:][:, ::-1]
        factors[k] = f
        dims = list(core.shape)
        dims[k] = r_eff
        core = fold(f.T @ a, k, dims)
    return TuckerFactors(core=core, factors=factors, dims=x.shape)


def local_orthogonality_loss(blocks) -> float:
    """max over blocks of ||U_i^T U_i - I||_2 and adjacent ||U_{i-1}^T U_i||_2."""
    blocks = [np.asarray(u) for u in blocks if np.asarray(u).shape[1] > 0]
    if not blocks:
        raise ValueError("need at least one nonempty block")
    loss = 0.0
    for i, u in enumerate(blocks):
        gram = u.T @ u - np.eye(u.shape[1])
        loss = max(loss, float(np.linalg.norm(gram, 2)))
        if i > 0:
            loss = max(loss, float(np.linalg.norm(blocks[i - 1].T @ u, 2)))
    return loss


def _blbp_mode(a: np.ndarray, eps: float, b: int, tol: float, rng) -> tuple:
    """One fixed-accuracy sweep on a single unfolding.

    Returns (factor, blocks, energy_estimate, deflation_count, iterations).
    """
    m, n = a.shape
    norm2 = float(np.linalg.norm(a) ** 2)
    if norm2 == 0.0:
        return np.zeros((m, 0)), [], 0.0, 0, 0

    g = rng.standard_normal((n, min(b, n)))
    v_cur, _ = np.linalg.qr(g)
    v_acc = v_cur
    u_blocks = []
    u_acc = np.zeros((m, 0))
    u_prev = None
    l_prev = None
    energy = norm2
    deflations = 0
    iters = 0
    max_iters = 2 * int(np.ceil(min(m, n) / max(b, 1))) + 4

    while iters < max_iters:
        iters += 1
        w = a @ v_cur
        if u_prev is not None and u_prev.shape[1] > 0 and l_prev is not None:
            w = w - u_prev @ l_prev
        u_i, r_i, s_u = defl_qr(w, tol)
        # never let the accumulators grow overcomplete: an oblique
        # projector smears captured energy back into later blocks
        keep_u = min(s_u, m - u_acc.shape[1])
        if keep_u < s_u:
            u_i, r_i, s_u = u_i[:, :keep_u], r_i[:keep_u, :], keep_u
        deflations += w.shape[1] - s_u
        u_blocks.append(u_i)
        u_acc = np.hstack([u_acc, u_i])
        energy -= float(np.linalg.norm(r_i) ** 2)

        w2 = a.T @ u_i - v_cur @ r_i.T
        w2 = w2 - v_acc @ (v_acc.T @ w2)
        v_next, l_t, s_v = defl_qr(w2, tol)
        keep_v = min(s_v, n - v_acc.shape[1])
        if keep_v < s_v:
            v_next, l_t, s_v = v_next[:, :keep_v], l_t[:keep_v, :], keep_v
        v_acc = np.hstack([v_acc, v_next])
        l_next = l_t.T  # shape (s_u, s_v)

        fill = min(b - s_v, n - v_acc.shape[1])
        if fill > 0:
            g_new = rng.standard_normal((n, fill))
            g_new = g_new - v_acc @ (v_acc.T @ g_new)
            v_fill, _ = np.linalg.qr(g_new)
            v_acc = np.hstack([v_acc, v_fill])
            v_next = np.hstack([v_next, v_fill])
            l_next = np.hstack([l_next, np.zeros((s_u, v_fill.shape[1]))])

        energy -= float(np.linalg.norm(l_next) ** 2)
        if energy < eps**2 * norm2:
            break
        if s_u == 0 or v_next.shape[1] == 0 or u_acc.shape[1] >= m:
            break
        v_cur = v_next
        u_prev = u_i
        l_prev = l_next

    return u_acc, u_blocks, energy, deflations, iters


def ad_rsthosvd_blbp(
    x: np.ndarray,
    eps: float,
    block: int = 10,
    defl_tol: float = None,
    order=None,
    seed: int = 0,
):
    """Fixed-accuracy randomized compression via block Lanczos bidiagonalization.

    ``eps`` is a per-mode relative tolerance: each sweep stops once the
    residual energy tracker drops below ``eps^2 ||A||_F^2`` for the
    current core's unfolding.  Returns the factors plus diagnostics
    (per-mode residual energy, discovered ranks, deflation counts and
    local orthogonality loss).
    """
    import warnings

    x = np.asarray(x, dtype=np.float64)
    d = x.ndim
    order = tuple(range(d)) if order is None else tuple(order)
    cfg = SketchConfig(mode="fixed-accuracy", order=order, eps=eps, block=block,
                       defl_tol=defl_tol, seed=seed)
    cfg.validate(x.shape)
    rng = np.random.default_rng(seed)

    factors = [None] * d
    diag = BLBPDiagnostics()
    core = x
    for k in order:
        a = unfold(core, k)
        norm = float(np.linalg.norm(a))
        tol = defl_tol if defl_tol is not None else 1e-10 * max(norm, 1e-300)
        if norm > 0 and tol >= norm:
            warnings.warn(
                f"deflation tolerance {tol:.3e} >= unfolding norm {norm:.3e} on mode {k}",
                stacklevel=2,
            )
        f, blocks, energy, defl, iters = _blbp_mode(a, eps, block, tol, rng)
        factors[k] = f
        diag.energy_estimates[k] = energy
        diag.ranks[k] = f.shape[1]
        diag.deflations[k] = defl
        diag.iterations[k] = iters
        diag.orth_loss[k] = local_orthogonality_loss(blocks) if blocks else 0.0
        dims = list(core.shape)
        dims[k] = f.shape[1]
        core = fold(f.T @ a, k, dims)
    return TuckerFactors(core=core, factors=factors, dims=x.shape), diag


def _compress(a: np.ndarray, sketch: SketchConfig):
    if sketch.mode == "fixed-rank":
        # inputs of rank below the sketch ranks degrade to the discovered
        # rank here (low-rank iterates are routine inside ADMM loops)
        return rsthosvd_bki(
            a,
            ranks=sketch.ranks,
            order=sketch.resolved_order(a.shape),
            blocks=sketch.blocks,
            krylov=sketch.krylov,
            seed=sketch.seed,
            strict_rank=False,
        )
    tf, _ = ad_rsthosvd_blbp(
        a,
        eps=sketch.eps,
        block=sketch.block,
        defl_tol=sketch.defl_tol,
        order=sketch.resolved_order(a.shape),
        seed=sketch.seed,
    )
    return tf


def gnhtsvt_randomized(
    a: np.ndarray,
    transform: Transform = DEFAULT_TRANSFORM,
    penalty=None,
    tau: float = 0.0,
    sketch: SketchConfig = None,
) -> np.ndarray:
    """Singular-value thresholding accelerated by Tucker compression.

    Compresses ``a``, applies the deterministic operator to the small
    core (the transform adapts to the core's trailing-mode sizes), and
    expands through the factors.  By default only modes 0 and 1 are
    compressed so the transform modes keep their lengths.
    """
    if sketch is None:
        raise ValueError("a sketch configuration is required")
    if sketch.order is None:
        sketch = SketchConfig(
            mode=sketch.mode, order=(0, 1), ranks=sketch.ranks, blocks=sketch.blocks,
            krylov=sketch.krylov, eps=sketch.eps, block=sketch.block,
            defl_tol=sketch.defl_tol, seed=sketch.seed,
        )
    tf = _compress(np.asarray(a, dtype=np.float64), sketch)
    if any(n == 0 for n in tf.core.shape):
        return np.zeros(tf.dims)
    core = gnhtsvt(tf.core, transform, penalty, tau)
    return TuckerFactors(core=core, factors=tf.factors, dims=tf.dims).reconstruct()
