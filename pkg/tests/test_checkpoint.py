import struct

import numpy as np
import pytest

from seqlab import checkpoint
from seqlab.errors import ChecksumError
from seqlab.kernels import _fnv1a64_py, fnv1a64
from seqlab.seqcore import residue_stream


def test_fnv_reference_values():
    assert fnv1a64(b"") == 0xcbf29ce484222325
    assert fnv1a64(b"a") == 0xaf63dc4c8601ec8c
    assert fnv1a64(b"foobar") == 0x85944171f73967e8
    blob = bytes(range(256)) * 7
    assert fnv1a64(blob) == _fnv1a64_py(blob)


def test_header_layout():
    t = residue_stream(7, 100)
    blob = checkpoint.encode(t)
    magic, version, m, n = struct.unpack_from("<4sIIQ", blob)
    assert (magic, version, m, n) == (b"SQLB", 1, 7, 100)
    payload = blob[20:120]
    assert list(payload) == t.values.tolist()
    assert struct.unpack_from("<Q", blob, 120)[0] == fnv1a64(payload)
    assert len(blob) == 128


def test_uint16_payload():
    t = residue_stream(1000, 50)
    blob = checkpoint.encode(t)
    assert len(blob) == 20 + 100 + 8
    assert np.frombuffer(blob[20:120], dtype="<u2").tolist() == t.values.tolist()
    assert checkpoint.decode(blob).values.tolist() == t.values.tolist()


@pytest.mark.parametrize("offset", [0, 6, 25, -3])
def test_corruption_detected(offset):
    blob = bytearray(checkpoint.encode(residue_stream(5, 200)))
    blob[offset] ^= 0x01
    with pytest.raises(ChecksumError):
        checkpoint.decode(bytes(blob))


def test_truncation_detected():
    blob = checkpoint.encode(residue_stream(5, 200))
    with pytest.raises(ChecksumError):
        checkpoint.decode(blob[:-1])
    with pytest.raises(ChecksumError):
        checkpoint.decode(blob[:10])


def test_round_trip_file(tmp_path):
    t = residue_stream(9, 10_000)
    path = tmp_path / "r.sqlb"
    checkpoint.save(t, path)
    back = checkpoint.load(path)
    assert back.limit == t.limit and back.modulus.m == 9
    assert np.array_equal(back.residues, t.residues)
    assert not back.residues.flags.writeable


@pytest.mark.parametrize("m", [8, 300])
def test_resume_equals_uninterrupted(tmp_path, m):
    path = tmp_path / "c.sqlb"
    part, done = checkpoint.resumable_residues(m, 50_000, path, every=7_000, stop_after=20_000)
    assert not done and part.limit == 20_000
    assert checkpoint.load(path).limit == 20_000
    full, done = checkpoint.resumable_residues(m, 50_000, path, every=7_000, resume=True)
    assert done
    assert np.array_equal(full.residues, residue_stream(m, 50_000).residues)


def test_resume_rejects_other_modulus(tmp_path):
    path = tmp_path / "c.sqlb"
    checkpoint.resumable_residues(8, 1000, path, stop_after=500)
    with pytest.raises(ValueError):
        checkpoint.resumable_residues(9, 1000, path, resume=True)
