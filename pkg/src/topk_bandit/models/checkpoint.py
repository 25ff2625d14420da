"""Weight checkpoint files.

Layout (all integers little-endian unsigned 32-bit unless noted)::

    magic    4 bytes  b"TKBW"
    version  u32      currently 1
    count    u32      number of parameter arrays
    repeated count times:
        name_len  u32, name  utf-8 bytes
        ndim      u32, dims  ndim x u32
        data      prod(dims) float64 little-endian, row-major

Arrays are written in ``model.checkpoint_arrays()`` order (``parameters()``
when the model has no extra state), named ``p0, p1, ...``.
Loading checks count and every shape against the receiving model.
"""
import struct

import numpy as np

from ..errors import FormatError

MAGIC = b"TKBW"
VERSION = 1


def _arrays(model):
    return getattr(model, "checkpoint_arrays", model.parameters)()


def save_weights(model, path):
    params = _arrays(model)
    with open(path, "wb") as f:
        f.write(MAGIC + struct.pack("<II", VERSION, len(params)))
        for i, p in enumerate(params):
            name = f"p{i}".encode()
            f.write(struct.pack("<I", len(name)) + name)
            f.write(struct.pack("<I", p.ndim) + struct.pack(f"<{p.ndim}I", *p.shape))
            f.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_weights(model, path):
    with open(path, "rb") as f:
        buf = f.read()
    if buf[:4] != MAGIC:
        raise FormatError(f"{path}: not a weight checkpoint")
    version, count = struct.unpack_from("<II", buf, 4)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported checkpoint version {version}")
    params = _arrays(model)
    if count != len(params):
        raise FormatError(f"{path}: {count} arrays, model has {len(params)}")
    off = 12
    try:
        for p in params:
            (nlen,) = struct.unpack_from("<I", buf, off)
            off += 4 + nlen
            (ndim,) = struct.unpack_from("<I", buf, off)
            shape = struct.unpack_from(f"<{ndim}I", buf, off + 4)
            off += 4 + 4 * ndim
            if tuple(shape) != p.shape:
                raise FormatError(f"{path}: shape {shape} does not match {p.shape}")
            nbytes = 8 * p.size
            if off + nbytes > len(buf):
                raise FormatError(f"{path}: truncated")
            p[...] = np.frombuffer(buf, dtype="<f8", count=p.size, offset=off).reshape(p.shape)
            off += nbytes
    except struct.error as exc:
        raise FormatError(f"{path}: truncated ({exc})") from None
