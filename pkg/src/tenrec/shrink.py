"""Structured tensor shrinkage and singular-value thresholding.

:func:`gnhtt` applies a scalar prox entry-wise, tube-wise or slice-wise
(groups with zero norm map to zero).  :func:`gnhtsvt` thresholds the
transform-domain singular values of every face, which solves

    min_G  tau * ||G||_{phi, L} + 0.5 * ||G - A||_F^2

for any penalty in the supported family.
"""

from __future__ import annotations

import numpy as np

from .core import check_tensor
from .penalties import Penalty
from .transform import (
    DEFAULT_TRANSFORM,
    Transform,
    _as_faces,
    _canonical_faces,
    _from_faces,
)
from .gradient import grad

__all__ = ["ShrinkStructure", "gnhtt", "gnhtsvt", "gnhtctv_value", "upsilon_value"]

STRUCTURES = ("entry", "tube", "slice")


class ShrinkStructure:
    """Validated tag selecting the grouping of the noise shrinkage."""

    def __init__(self, tag: str):
        tag = str(tag).lower()
        if tag not in STRUCTURES:
            raise ValueError(f"structure must be one of {STRUCTURES}, got {tag!r}")
        self.tag = tag

    def __repr__(self):
        return f"ShrinkStructure({self.tag!r})"

    def __eq__(self, other):
        other_tag = other.tag if isinstance(other, ShrinkStructure) else other
        return self.tag == other_tag


def _group_scale(a: np.ndarray, penalty: Penalty, level: float, axes: tuple) -> np.ndarray:
    gnorm = np.sqrt(np.sum(a**2, axis=axes, keepdims=True))
    shrunk = penalty.prox(level, gnorm)
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(gnorm > 0, shrunk / np.where(gnorm > 0, gnorm, 1.0), 0.0)
    return a * scale


def gnhtt(a: np.ndarray, penalty: Penalty, level: float, structure="entry") -> np.ndarray:
    """Generalized nonconvex tensor thresholding at ``level``.

    entry: elementwise prox; tube: each (i1, i2) fiber along modes >= 2
    scaled by prox(||fiber||)/||fiber||; slice: same per face slice.
    """
    a = np.asarray(a, dtype=np.float64)
    tag = ShrinkStructure(structure).tag if not isinstance(structure, ShrinkStructure) else structure.tag
    if level < 0:
        raise ValueError("shrinkage level must be >= 0")
    if tag == "entry":
        return penalty.prox(level, a)
    if a.ndim < 3:
        raise ValueError("tube/slice shrinkage requires an order >= 3 tensor")
    if tag == "tube":
        return _group_scale(a, penalty, level, tuple(range(2, a.ndim)))
    return _group_scale(a, penalty, level, (0, 1))


def gnhtsvt(
    a: np.ndarray,
    transform: Transform = DEFAULT_TRANSFORM,
    penalty: Penalty = None,
    tau: float = 0.0,
) -> np.ndarray:
    """Threshold transform-domain singular values with ``penalty.prox(tau, .)``.

    ``tau = 0`` returns the input (up to transform round-trip error).
    """
    a = check_tensor(a, min_order=3)
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if penalty is None:
        raise ValueError("a penalty is required")
    af = _as_faces(transform.apply(a))
    nf = af.shape[2]
    mirror = transform.mirror_faces(a.shape)
    out = np.empty_like(af)
    for j in _canonical_faces(nf, mirror):
        face = af[:, :, j]
        self_mirror = mirror is not None and mirror[j] == j
        if self_mirror:
            face = face.real
        u, s, vh = np.linalg.svd(face, full_matrices=False)
        s2 = penalty.prox(tau, s)
        rec = (u * s2) @ vh
        out[:, :, j] = rec
        if mirror is not None and mirror[j] != j:
            out[:, :, int(mirror[j])] = np.conj(rec)
    return transform.inverse(_from_faces(out, a.shape))


def gnhtctv_value(
    a: np.ndarray,
    modes,
    transform: Transform = DEFAULT_TRANSFORM,
    penalty: Penalty = None,
    level: float = 1.0,
) -> float:
    """Diagnostic value of the gradient-domain spectral penalty.

    Averages, over the modes in ``modes``, the penalized transform-domain
    singular values of each gradient tensor (scaled by 1/rho).  No solver
    update needs this quantity; it is reported for monitoring only.
    """
    from .transform import face_singular_values

    modes = tuple(modes)
    if not modes:
        raise ValueError("mode set must be nonempty")
    rho = transform.rho(a.shape)
    total = 0.0
    for k in modes:
        sv = face_singular_values(grad(a, k), transform)
        total += float(np.sum(penalty.value(sv, level))) / rho
    return total / len(modes)


def upsilon_value(e: np.ndarray, penalty: Penalty, structure="entry", level: float = 1.0) -> float:
    """Value of the structured noise penalty (sum of penalized group norms)."""
    e = np.asarray(e, dtype=np.float64)
    tag = ShrinkStructure(structure).tag if not isinstance(structure, ShrinkStructure) else structure.tag
    if tag == "entry":
        return float(np.sum(penalty.value(np.abs(e), level)))
    if e.ndim < 3:
        raise ValueError("tube/slice penalty requires an order >= 3 tensor")
    axes = tuple(range(2, e.ndim)) if tag == "tube" else (0, 1)
    gnorm = np.sqrt(np.sum(e**2, axis=axes))
    return float(np.sum(penalty.value(gnorm, level)))
