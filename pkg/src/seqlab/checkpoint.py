"""Binary checkpoints for the residue pass.

Layout (little endian)::

    b"SQLB" | version u32 | modulus u32 | reached N u64 | payload | FNV-1a u64

The payload is a_1..a_N mod m, one byte per entry for m <= 256 and two bytes
(little-endian uint16) otherwise. The checksum covers the payload only.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

from seqlab.errors import ChecksumError
from seqlab.kernels import extend_residues, fnv1a64
from seqlab.seqcore import Modulus, ResidueTable, _check_capacity

MAGIC = b"SQLB"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")
_TRAILER = struct.Struct("<Q")


def encode(table: ResidueTable) -> bytes:
    payload = table.values.astype(table.modulus.dtype).astype(
        "<u1" if table.modulus.m <= 256 else "<u2").tobytes()
    return (_HEADER.pack(MAGIC, VERSION, table.modulus.m, table.limit) + payload
            + _TRAILER.pack(fnv1a64(payload)))


def decode(blob: bytes) -> ResidueTable:
    if len(blob) < _HEADER.size + _TRAILER.size:
        raise ChecksumError("checkpoint truncated")
    magic, version, m, n = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ChecksumError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ChecksumError(f"unsupported checkpoint version {version}")
    mod = Modulus.of(m)
    width = 1 if m <= 256 else 2
    payload = blob[_HEADER.size:_HEADER.size + n * width]
    if len(payload) != n * width or len(blob) != _HEADER.size + n * width + _TRAILER.size:
        raise ChecksumError("checkpoint length does not match header")
    (stored,) = _TRAILER.unpack_from(blob, _HEADER.size + n * width)
    if fnv1a64(payload) != stored:
        raise ChecksumError("checkpoint checksum mismatch")
    res = np.zeros(n + 1, dtype=mod.dtype)
    res[1:] = np.frombuffer(payload, dtype="<u1" if width == 1 else "<u2")
    res.flags.writeable = False
    return ResidueTable(modulus=mod, limit=int(n), residues=res)


def save(table: ResidueTable, path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(encode(table))
    os.replace(tmp, path)


def load(path) -> ResidueTable:
    return decode(Path(path).read_bytes())


def resumable_residues(m, N: int, path=None, *, every: int = 1_000_000,
                       resume: bool = False, stop_after: int | None = None):
    """Residue pass that checkpoints to ``path`` every ``every`` indices.

    Returns ``(table, complete)``. With ``stop_after`` the pass halts once that
    index is reached (``complete`` is then False) leaving a checkpoint behind.
    """
    mod = Modulus.of(m)
    N = int(N)
    _check_capacity((N + 1) * np.dtype(mod.dtype).itemsize, f"residue table mod {mod.m} up to {N}")
    res = np.zeros(N + 1, dtype=mod.dtype)
    res[1] = 1
    reached = 1
    if resume and path is not None and Path(path).exists():
        prev = load(path)
        if prev.modulus.m != mod.m:
            raise ValueError(f"checkpoint is for modulus {prev.modulus.m}, not {mod.m}")
        reached = min(prev.limit, N)
        res[: reached + 1] = prev.residues[: reached + 1]
    target = N if stop_after is None else min(N, max(int(stop_after), reached))
    while reached < target:
        nxt = min(target, reached + every)
        extend_residues(res, reached + 1, nxt + 1, mod.m)
        reached = nxt
        if path is not None:
            save(_view(res, mod, reached), path)
    return _view(res, mod, reached), reached >= N


def _view(res, mod, reached) -> ResidueTable:
    part = res[: reached + 1].copy()
    part.flags.writeable = False
    return ResidueTable(modulus=mod, limit=reached, residues=part)
