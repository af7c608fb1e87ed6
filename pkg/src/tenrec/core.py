"""Dense tensor reshaping algebra: unfoldings, mode products, norms.

Tensors are plain ``numpy.ndarray``s of float64 (complex128 in the
transform domain).  All reshaping follows the column-major convention:
the first index varies fastest, and mode-k unfoldings order the
remaining modes ascending with the earliest mode fastest.  Modes are
0-based throughout the package.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "check_tensor",
    "unfold",
    "fold",
    "mode_product",
    "norms",
    "inner",
]


def check_tensor(x: np.ndarray, min_order: int = 1) -> np.ndarray:
    """Validate a dense tensor: nonempty dims, finite entries.

    Returns the array unchanged so the call can be chained.
    """
    x = np.asarray(x)
    if x.ndim < min_order:
        raise ValueError(f"tensor order {x.ndim} < required {min_order}")
    if any(n <= 0 for n in x.shape):
        raise ValueError(f"empty tensors are not supported, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("tensor contains non-finite entries")
    return x


def unfold(x: np.ndarray, mode: int) -> np.ndarray:
    """Mode-``mode`` unfolding of ``x`` into an ``n_mode x prod(rest)`` matrix.

    Column j enumerates the non-``mode`` indices in ascending mode order
    with the earliest mode fastest, so ``fold(unfold(x, k), k, x.shape)``
    is the identity bit-exactly.
    """
    x = np.asarray(x)
    if not 0 <= mode < x.ndim:
        raise ValueError(f"mode {mode} out of range for order-{x.ndim} tensor")
    return np.reshape(np.moveaxis(x, mode, 0), (x.shape[mode], -1), order="F")


def fold(m: np.ndarray, mode: int, dims) -> np.ndarray:
    """Inverse of :func:`unfold`: rebuild a tensor of shape ``dims``."""
    m = np.asarray(m)
    dims = tuple(int(n) for n in dims)
    if not 0 <= mode < len(dims):
        raise ValueError(f"mode {mode} out of range for order-{len(dims)} tensor")
    rest = dims[:mode] + dims[mode + 1:]
    expected = (dims[mode], int(np.prod(rest, dtype=np.int64)) if rest else 1)
    if m.shape != expected:
        raise ValueError(f"matrix shape {m.shape} does not match unfolding {expected}")
    moved = np.reshape(m, (dims[mode],) + rest, order="F")
    return np.moveaxis(moved, 0, mode)


def mode_product(x: np.ndarray, u: np.ndarray, mode: int) -> np.ndarray:
    """Mode-``mode`` product ``x ×_mode u``; replaces ``n_mode`` by ``u.shape[0]``."""
    x = np.asarray(x)
    u = np.asarray(u)
    if u.ndim != 2:
        raise ValueError("mode product expects a matrix")
    if u.shape[1] != x.shape[mode]:
        raise ValueError(
            f"matrix has {u.shape[1]} columns but mode {mode} has length {x.shape[mode]}"
        )
    dims = list(x.shape)
    dims[mode] = u.shape[0]
    return fold(u @ unfold(x, mode), mode, dims)


def norms(x: np.ndarray) -> dict:
    """Frobenius, l1, tube-l1 and slice-l1 norms of ``x``.

    Tubes run along all modes >= 2 (0-based); slices are the faces
    ``x[:, :, i2, ..., id]``.  Tube/slice norms require order >= 3.
    """
    x = np.asarray(x)
    if x.ndim < 3:
        raise ValueError("tube1/slice1 norms require an order >= 3 tensor")
    trailing = tuple(range(2, x.ndim))
    sq = np.abs(x) ** 2
    return {
        "fro": float(np.sqrt(np.sum(sq))),
        "l1": float(np.sum(np.abs(x))),
        "tube1": float(np.sum(np.sqrt(np.sum(sq, axis=trailing)))),
        "slice1": float(np.sum(np.sqrt(np.sum(sq, axis=(0, 1))))),
    }


def inner(x: np.ndarray, y: np.ndarray) -> float:
    """Inner product ``sum(x * y)`` of two same-shaped real tensors."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {y.shape}")
    return float(np.sum(x * y))
