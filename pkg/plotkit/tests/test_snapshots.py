import numpy as np
import pytest

from plotkit import load_snapshot

from flowdata import final_snapshot


def test_load_bubble_snapshot(bubble_run):
    snap = load_snapshot(final_snapshot(bubble_run))
    assert snap.n == 64
    assert snap.ambient == 3
    assert snap.t == pytest.approx(0.5)
    norms = np.sqrt((snap.f * snap.f).sum(axis=-1))
    assert np.abs(norms - 1.0).max() < 1e-9  # map sits on the unit sphere
    assert np.all(snap.v > 0.0)
    assert np.array_equal(snap.u(), 0.5 * np.log(snap.v))
    g2 = snap.grad2()
    assert g2.shape == (64, 64)
    assert np.all(g2 >= 0.0)


def test_grad2_scales_with_box_size(bubble_run):
    snap = load_snapshot(final_snapshot(bubble_run))
    # halving the box doubles 1/h, so the density scales by four
    assert np.allclose(snap.grad2(np.pi), 4.0 * snap.grad2(2.0 * np.pi))


def write(tmp_path, text):
    path = tmp_path / "s.dat"
    path.write_text(text)
    return path


def test_load_rejects_bad_snapshots(tmp_path):
    with pytest.raises(ValueError, match="not a CHFSNAP1"):
        load_snapshot(write(tmp_path, "SNAP n=2 L=3 t=0\n"))
    with pytest.raises(ValueError, match="malformed"):
        load_snapshot(write(tmp_path, "CHFSNAP1 n=x L=3 t=0\n"))
    with pytest.raises(ValueError, match="does not match"):
        load_snapshot(write(tmp_path, "CHFSNAP1 n=2 L=3 t=0\n0 0 1 1\n"))
    body = "0 0 1 0\n" * 4
    with pytest.raises(ValueError, match="positive"):
        load_snapshot(write(tmp_path, "CHFSNAP1 n=2 L=3 t=0\n" + body))
