"""GTEN v1 binary tensor files.

Layout: magic ``GTEN``; u8 version = 1; u8 dtype (1 = float64); u8
order d; u8 reserved = 0; d little-endian u64 dims; then prod(dims)
little-endian float64 payload in column-major order.  Round trips are
bit-exact.
"""

from __future__ import annotations

import struct

import numpy as np

__all__ = [
    "GtenError",
    "GtenMagicError",
    "GtenVersionError",
    "GtenHeaderError",
    "GtenTruncatedError",
    "write_tensor",
    "read_tensor",
]

_MAGIC = b"GTEN"
_VERSION = 1
_DTYPE_F64 = 1


class GtenError(ValueError):
    """Base class for tensor-file format failures."""


class GtenMagicError(GtenError):
    pass


class GtenVersionError(GtenError):
    pass


class GtenHeaderError(GtenError):
    pass


class GtenTruncatedError(GtenError):
    pass


def write_tensor(path, x: np.ndarray) -> None:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim < 1 or x.ndim > 255:
        raise GtenHeaderError(f"unsupported tensor order {x.ndim}")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<BBBB", _VERSION, _DTYPE_F64, x.ndim, 0))
        fh.write(struct.pack(f"<{x.ndim}Q", *x.shape))
        fh.write(np.ravel(x, order="F").astype("<f8").tobytes())


def read_tensor(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 8:
        raise GtenTruncatedError("file shorter than the fixed header")
    if raw[:4] != _MAGIC:
        raise GtenMagicError(f"bad magic {raw[:4]!r}")
    version, dtype, order, reserved = struct.unpack("<BBBB", raw[4:8])
    if version != _VERSION:
        raise GtenVersionError(f"unsupported version {version}")
    if dtype != _DTYPE_F64:
        raise GtenVersionError(f"unsupported dtype tag {dtype}")
    if order == 0:
        raise GtenHeaderError("zero-order tensors are not valid")
    if reserved != 0:
        raise GtenHeaderError(f"reserved byte must be zero, got {reserved}")
    need = 8 + 8 * order
    if len(raw) < need:
        raise GtenTruncatedError("file ends inside the dims header")
    dims = struct.unpack(f"<{order}Q", raw[8:need])
    if any(n == 0 for n in dims):
        raise GtenHeaderError(f"zero-length mode in dims {dims}")
    count = int(np.prod(dims, dtype=np.uint64))
    total = need + 8 * count
    if len(raw) < total:
        raise GtenTruncatedError(
            f"payload truncated: need {total} bytes, file has {len(raw)}"
        )
    data = np.frombuffer(raw[need:total], dtype="<f8")
    return data.reshape(dims, order="F").astype(np.float64)
