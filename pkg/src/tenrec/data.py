"""Synthetic benchmark tensors, the corruption protocol, and metrics."""

from __future__ import annotations

import numpy as np

from .core import mode_product

__all__ = [
    "synth_lowrank_smooth",
    "synth_spectral_decay",
    "corrupt",
    "metrics",
]


def _cosine_basis(n: int, r: int) -> np.ndarray:
    """First r orthonormal DCT-II basis vectors; column 0 is constant."""
    t = np.arange(n)
    cols = [np.full(n, 1.0 / np.sqrt(n))]
    for j in range(1, r):
        c = np.cos(np.pi * (t + 0.5) * j / n)
        cols.append(c * np.sqrt(2.0 / n))
    return np.stack(cols, axis=1)


def synth_lowrank_smooth(dims, rank, smoothness: float = 0.5, seed: int = 0) -> np.ndarray:
    """Low-multilinear-rank tensor with tunable factor smoothness in [0, 1].

    Factors keep the constant direction in their span (the lowest
    cosine), so the affine rescale to [0, 1] preserves the requested
    multilinear rank; the remaining columns blend Gaussian noise with
    low-frequency cosines.  The Gaussian block is drawn for every
    smoothness level, so matched seeds are directly comparable.
    """
    dims = tuple(int(n) for n in dims)
    rank = tuple(int(r) for r in rank)
    if len(rank) != len(dims):
        raise ValueError("need one rank per mode")
    if any(not 1 <= r <= n for r, n in zip(rank, dims)):
        raise ValueError(f"rank {rank} invalid for dims {dims}")
    if not 0 <= smoothness <= 1:
        raise ValueError("smoothness must lie in [0, 1]")
    rng = np.random.default_rng(seed)

    core = rng.standard_normal(rank)
    # smoothness also concentrates core energy on the leading (low
    # frequency) factor columns; at smoothness 0 the core is untouched
    for mode, r in enumerate(rank):
        w = (1.0 - smoothness) + smoothness / (1.0 + np.arange(r))
        shape = [1] * len(rank)
        shape[mode] = r
        core = core * w.reshape(shape)
    x = core
    for mode, (n, r) in enumerate(zip(dims, rank)):
        gauss = rng.standard_normal((n, r))
        cosine = _cosine_basis(n, r)
        mix = (1.0 - smoothness) * gauss + smoothness * cosine
        mix[:, 0] = cosine[:, 0]  # keep the constant direction exactly
        q, _ = np.linalg.qr(mix)
        x = mode_product(x, q, mode)

    lo, hi = float(x.min()), float(x.max())
    if hi - lo < 1e-12:
        return np.full(dims, 0.5)
    return (x - lo) / (hi - lo)


def synth_spectral_decay(dims, decay: float = 0.85, seed: int = 0) -> np.ndarray:
    """Random tensor whose unfoldings have geometrically decaying spectra."""
    dims = tuple(int(n) for n in dims)
    if not 0 < decay < 1:
        raise ValueError("decay must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    core = rng.standard_normal(dims)
    for mode, n in enumerate(dims):
        shape = [1] * len(dims)
        shape[mode] = n
        core = core * (decay ** np.arange(n)).reshape(shape)
    x = core
    for mode, n in enumerate(dims):
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        x = mode_product(x, q, mode)
    return x


def corrupt(x: np.ndarray, sr: float, nr: float, seed: int = 0):
    """Impulse corruption followed by uniform sampling.

    Replaces exactly ``round(nr * N)`` entries with uniform [0, 1]
    draws, then samples exactly ``round(sr * N)`` indices without
    replacement into the observed set.  Returns ``(mobs, mask, etrue)``
    where ``mobs`` is the noisy tensor on the mask (zero elsewhere) and
    ``etrue`` the applied perturbation.  Noise may fall on unobserved
    entries; the two supports are drawn independently.
    """
    x = np.asarray(x, dtype=np.float64)
    if not 0 < sr <= 1:
        raise ValueError("sampling rate must lie in (0, 1]")
    if not 0 <= nr < 1:
        raise ValueError("noise ratio must lie in [0, 1)")
    n_total = x.size
    n_obs = int(round(sr * n_total))
    if n_obs < 1:
        raise ValueError("sampling rate leaves no observed entries")
    rng = np.random.default_rng(seed)

    noisy = np.ravel(x, order="F").copy()
    n_noise = int(round(nr * n_total))
    if n_noise > 0:
        support = rng.choice(n_total, size=n_noise, replace=False)
        noisy[support] = rng.uniform(0.0, 1.0, size=n_noise)
    obs_idx = rng.choice(n_total, size=n_obs, replace=False)

    mask_flat = np.zeros(n_total, dtype=bool)
    mask_flat[obs_idx] = True
    mask = mask_flat.reshape(x.shape, order="F")
    noisy_t = noisy.reshape(x.shape, order="F")
    mobs = np.where(mask, noisy_t, 0.0)
    etrue = noisy_t - x
    return mobs, mask, etrue


def _psnr(mse: float) -> float:
    if mse <= 0:
        return 100.0
    return float(min(10.0 * np.log10(1.0 / mse), 100.0))


def metrics(xref: np.ndarray, xhat: np.ndarray) -> dict:
    """PSNR (unit peak), per-face mean PSNR, and relative square error."""
    xref = np.asarray(xref, dtype=np.float64)
    xhat = np.asarray(xhat, dtype=np.float64)
    if xref.shape != xhat.shape:
        raise ValueError(f"shape mismatch {xref.shape} vs {xhat.shape}")
    if xref.min() < -1e-9 or xref.max() > 1 + 1e-9:
        raise ValueError("reference tensor must lie in [0, 1]")
    ref_norm = float(np.linalg.norm(xref))
    if ref_norm == 0:
        raise ValueError("zero reference tensor has no relative error")
    err = xhat - xref
    mse = float(np.mean(err**2))
    if xref.ndim >= 3:
        flat = err.reshape(err.shape[0] * err.shape[1], -1, order="F")
        face_mse = np.mean(flat**2, axis=0)
        band = float(np.mean([_psnr(v) for v in face_mse]))
    else:
        band = _psnr(mse)
    return {
        "psnr": _psnr(mse),
        "band_mean_psnr": band,
        "rse": float(np.linalg.norm(err) / ref_norm),
    }
