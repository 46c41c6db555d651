import struct

import numpy as np
import pytest

from nsac.diffuse_solver import DiffuseState, GridSpec
from nsac.errors import BadMagic, TruncatedFile, ValidationError, VersionMismatch
from nsac.io import HEADER_SIZE, load_config, read_csv, read_snapshot, write_csv, write_snapshot


@pytest.fixture
def state():
    rng = np.random.default_rng(11)
    grid = GridSpec(24, 16, 1.5, 1.0)
    arrs = [rng.standard_normal(grid.shape) for _ in range(4)]
    return DiffuseState(*arrs, t=0.125, eps=0.03, grid=grid)


def test_roundtrip_bitwise(tmp_path, state):
    path = tmp_path / "s.nsac"
    write_snapshot(path, state)
    back = read_snapshot(path)
    for a, b in zip((state.c, state.u, state.v, state.p), (back.c, back.u, back.v, back.p)):
        assert a.tobytes() == b.tobytes()
    assert (back.t, back.eps, back.grid) == (state.t, state.eps, state.grid)


def test_layout(tmp_path, state):
    path = tmp_path / "s.nsac"
    write_snapshot(path, state)
    raw = path.read_bytes()
    assert raw[:5] == b"NSAC1"
    assert struct.unpack_from("<IIdddd", raw, 5) == (24, 16, 1.5, 1.0, 0.125, 0.03)
    first = np.frombuffer(raw, "<f8", count=24 * 16, offset=HEADER_SIZE).reshape(16, 24)
    assert np.array_equal(first, state.c)
    assert len(raw) == HEADER_SIZE + 4 * 8 * 24 * 16


@pytest.mark.parametrize("cut", [3, 20, HEADER_SIZE + 100])
def test_truncated(tmp_path, state, cut):
    path = tmp_path / "s.nsac"
    write_snapshot(path, state)
    path.write_bytes(path.read_bytes()[:cut])
    with pytest.raises(TruncatedFile):
        read_snapshot(path)


def test_bad_magic(tmp_path, state):
    path = tmp_path / "s.nsac"
    write_snapshot(path, state)
    path.write_bytes(b"XXXX1" + path.read_bytes()[5:])
    with pytest.raises(BadMagic):
        read_snapshot(path)


def test_other_version(tmp_path, state):
    path = tmp_path / "s.nsac"
    write_snapshot(path, state)
    path.write_bytes(b"NSAC2" + path.read_bytes()[5:])
    with pytest.raises(VersionMismatch):
        read_snapshot(path)


def test_big_endian_rejected(tmp_path, state):
    g = state.grid
    body = b"NSAC1" + struct.pack(">IIdddd", g.nx, g.ny, g.lx, g.ly, state.t, state.eps)
    for a in (state.c, state.u, state.v, state.p):
        body += a.astype(">f8").tobytes()
    path = tmp_path / "be.nsac"
    path.write_bytes(body)
    with pytest.raises((VersionMismatch, BadMagic)):
        read_snapshot(path)


def test_csv_seventeen_digits(tmp_path):
    vals = [np.pi, 1 / 3, 1e-300, -2.5e17, 0.1 + 0.2]
    path = tmp_path / "t.csv"
    write_csv(path, ["k", "x"], [[i, v] for i, v in enumerate(vals)])
    header, rows = read_csv(path)
    assert header == ["k", "x"]
    assert all(rows[i, 1] == v for i, v in enumerate(vals))
    assert "3.1415926535897931" in path.read_text()


def test_load_config(tmp_path):
    good = tmp_path / "c.toml"
    good.write_text('scenario = "TwoCircles"\neps_list = [0.04, 0.02]\n[converge]\nt_end = 0.1\n')
    cfg = load_config(good)
    assert cfg["eps_list"] == [0.04, 0.02] and cfg["converge"]["t_end"] == 0.1
    bad = tmp_path / "b.toml"
    bad.write_text("eps = = 3")
    with pytest.raises(ValidationError):
        load_config(bad)
    with pytest.raises(ValidationError):
        load_config(tmp_path / "missing.toml")
