"""Circulant mode-wise difference operators and their FFT-diagonalized solver.

``grad(x, k)`` applies the forward circular difference along mode k
(``y_i = x_{i+1 mod n} - x_i``), the mode product with a row-circulant
matrix of ``(-1, 1, 0, ..., 0)``.  Because the operator is circulant,
``I + sum_k grad_adjoint(grad(.))`` diagonalizes under the full
d-dimensional FFT with strictly positive eigenvalues
``1 + sum_k 4 sin^2(pi j_k / n_k)``, which :func:`solve_grad_system`
exploits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft

__all__ = ["grad", "grad_adjoint", "circulant_freq", "GradientSet", "solve_grad_system"]


def grad(x: np.ndarray, mode: int) -> np.ndarray:
    """Forward circular difference along ``mode``."""
    x = np.asarray(x)
    if not 0 <= mode < x.ndim:
        raise ValueError(f"mode {mode} out of range for order-{x.ndim} tensor")
    return np.roll(x, -1, axis=mode) - x


def grad_adjoint(y: np.ndarray, mode: int) -> np.ndarray:
    """Adjoint of :func:`grad`: ``inner(grad(x,k), y) == inner(x, grad_adjoint(y,k))``."""
    y = np.asarray(y)
    if not 0 <= mode < y.ndim:
        raise ValueError(f"mode {mode} out of range for order-{y.ndim} tensor")
    return np.roll(y, 1, axis=mode) - y


def circulant_freq(n: int) -> np.ndarray:
    """Frequency response ``exp(2 pi i j / n) - 1`` of the difference operator."""
    return np.exp(2j * np.pi * np.arange(n) / n) - 1.0


@dataclass
class GradientSet:
    """Smoothness directions and precomputed frequency responses.

    Holds the denominator ``1 + sum_k |lambda_k|^2`` of the linear system
    so repeated solves on the same shape reuse it.
    """

    dims: tuple
    modes: tuple
    denominator: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.dims = tuple(int(n) for n in self.dims)
        self.modes = tuple(int(k) for k in self.modes)
        if not self.modes:
            raise ValueError("gradient mode set must be nonempty")
        for k in self.modes:
            if not 0 <= k < len(self.dims):
                raise ValueError(f"gradient mode {k} out of range for dims {self.dims}")
        denom = np.ones(self.dims)
        for k in self.modes:
            denom = denom + self._freq_sq(k)
        self.denominator = denom

    def freq(self, mode: int) -> np.ndarray:
        """Response of mode ``mode`` broadcast to the tensor shape."""
        lam = circulant_freq(self.dims[mode])
        shape = [1] * len(self.dims)
        shape[mode] = self.dims[mode]
        return lam.reshape(shape)

    def _freq_sq(self, mode: int) -> np.ndarray:
        n = self.dims[mode]
        lam2 = 4.0 * np.sin(np.pi * np.arange(n) / n) ** 2
        shape = [1] * len(self.dims)
        shape[mode] = n
        return lam2.reshape(shape)

    def apply_operator(self, x: np.ndarray) -> np.ndarray:
        """``(I + sum_k grad_adjoint(grad(.)))(x)`` in the spatial domain."""
        out = np.asarray(x, dtype=np.float64).copy()
        for k in self.modes:
            out += grad_adjoint(grad(x, k), k)
        return out


def solve_grad_system(b: np.ndarray, grads: dict, gset: GradientSet) -> np.ndarray:
    """Solve ``(I + sum_k D_k^T D_k)(L) = b + sum_k D_k^T(grads[k])``.

    ``grads`` maps each mode in ``gset.modes`` to a tensor of the same
    shape as ``b``.  The system is diagonal in the frequency domain with
    denominator >= 1, so the solve is exact up to FFT round-off.
    """
    b = np.asarray(b, dtype=np.float64)
    if b.shape != gset.dims:
        raise ValueError(f"rhs shape {b.shape} does not match gradient set {gset.dims}")
    num = scipy.fft.fftn(b)
    for k in gset.modes:
        g = np.asarray(grads[k], dtype=np.float64)
        if g.shape != b.shape:
            raise ValueError(f"gradient term for mode {k} has shape {g.shape}")
        num += np.conj(gset.freq(k)) * scipy.fft.fftn(g)
    return np.real(scipy.fft.ifftn(num / gset.denominator))
