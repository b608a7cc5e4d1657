import json
import struct

import numpy as np
import pytest

from lsmkit.datasets import dvsgesture, nmnist, shd
from lsmkit.eventio import read_events
from lsmkit.harness import load_manifest


def pack_nmnist_events(t, x, y, p):
    out = bytearray()
    for ti, xi, yi, pi in zip(t, x, y, p):
        out.append(xi)
        out.append(yi)
        out.append((pi << 7) | ((ti >> 16) & 0x7F))
        out.append((ti >> 8) & 0xFF)
        out.append(ti & 0xFF)
    return bytes(out)


class TestNmnist:
    def test_bin_decoding(self, tmp_path):
        t = [0, 1000, 70000, 300_000]
        x = [0, 33, 5, 12]
        y = [7, 0, 33, 20]
        p = [1, 0, 1, 0]
        path = tmp_path / "ev.bin"
        path.write_bytes(pack_nmnist_events(t, x, y, p))
        stream = nmnist.read_bin(path)
        assert stream.t.tolist() == t
        assert stream.x.tolist() == x
        assert stream.y.tolist() == y
        assert stream.p.tolist() == p

    def test_convert_builds_manifest(self, tmp_path):
        raw = tmp_path / "raw"
        for split in ("Train", "Test"):
            for digit in (0, 3):
                d = raw / split / str(digit)
                d.mkdir(parents=True)
                (d / "00001.bin").write_bytes(
                    pack_nmnist_events([10, 500, 9000], [1, 2, 3], [4, 5, 6], [0, 1, 0])
                )
        out = tmp_path / "conv"
        manifest_path = nmnist.convert(raw, out)
        manifest = load_manifest(manifest_path)
        assert manifest.width == 34 and manifest.channels == 2
        assert len(manifest.train) == 2 and len(manifest.test) == 2
        labels = sorted(read_events(p).label for p in manifest.train)
        assert labels == [0, 3]


class TestShd:
    def test_convert(self, tmp_path):
        h5py = pytest.importorskip("h5py")
        raw = tmp_path / "raw"
        raw.mkdir()
        for name, n in (("shd_train.h5", 3), ("shd_test.h5", 2)):
            with h5py.File(raw / name, "w") as fh:
                vlen_f = h5py.special_dtype(vlen=np.dtype("float64"))
                vlen_u = h5py.special_dtype(vlen=np.dtype("int64"))
                times = fh.create_dataset("spikes/times", (n,), dtype=vlen_f)
                units = fh.create_dataset("spikes/units", (n,), dtype=vlen_u)
                for i in range(n):
                    times[i] = np.array([0.001 * i, 0.5, 0.75])
                    units[i] = np.array([5, 699, 0])
                fh.create_dataset("labels", data=np.arange(n) % 20)
        out = tmp_path / "conv"
        manifest_path = shd.convert(raw, out)
        manifest = load_manifest(manifest_path)
        assert manifest.width == 700 and manifest.height == 1 and manifest.channels == 1
        assert len(manifest.train) == 3 and len(manifest.test) == 2
        stream = read_events(manifest.train[1])
        assert stream.label == 1
        assert stream.t.tolist() == [1000, 500_000, 750_000]
        assert stream.x.tolist() == [5, 699, 0]


def write_aedat(path, events, overflow=0):
    """events: list of (t, x, y, p)."""
    with open(path, "wb") as fh:
        fh.write(b"#!AER-DAT3.1\r\n")
        fh.write(b"#Format: RAW\r\n")
        fh.write(b"#!END-HEADER\r\n")
        n = len(events)
        fh.write(struct.pack("<hhiiiiii", 1, 0, 8, 0, overflow, n, n, n))
        for t, x, y, p in events:
            data = 1 | (p << 1) | (y << 2) | (x << 17)
            fh.write(struct.pack("<II", data, t))


class TestDvsGesture:
    def test_aedat_decoding(self, tmp_path):
        path = tmp_path / "user.aedat"
        write_aedat(path, [(100, 3, 7, 1), (50, 127, 0, 0), (200, 64, 64, 1)])
        t, x, y, p = dvsgesture.read_aedat(path)
        assert t.tolist() == [50, 100, 200]
        assert x.tolist() == [127, 3, 64]
        assert y.tolist() == [0, 7, 64]
        assert p.tolist() == [0, 1, 1]

    def test_invalid_events_dropped(self, tmp_path):
        path = tmp_path / "user.aedat"
        with open(path, "wb") as fh:
            fh.write(b"#!AER-DAT3.1\r\n#!END-HEADER\r\n")
            fh.write(struct.pack("<hhiiiiii", 1, 0, 8, 0, 0, 2, 2, 1))
            fh.write(struct.pack("<II", 0 | (1 << 1) | (2 << 2) | (3 << 17), 10))
            fh.write(struct.pack("<II", 1 | (1 << 1) | (2 << 2) | (3 << 17), 20))
        t, x, y, p = dvsgesture.read_aedat(path)
        assert t.tolist() == [20]

    def test_convert_slices_trials(self, tmp_path):
        raw = tmp_path / "raw" / "DvsGesture"
        raw.mkdir(parents=True)
        events = [(1000 * i, i % 128, (3 * i) % 128, i % 2) for i in range(100)]
        for user in ("user01.aedat", "user02.aedat"):
            write_aedat(raw / user, events)
            (raw / user.replace(".aedat", "_labels.csv")).write_text(
                "class,startTime_usec,endTime_usec\n"
                "1,0,30000\n"
                "5,30000,70000\n"
            )
        (raw / "trials_to_train.txt").write_text("user01.aedat\n")
        (raw / "trials_to_test.txt").write_text("user02.aedat\n")
        out = tmp_path / "conv"
        manifest_path = dvsgesture.convert(tmp_path / "raw", out)
        manifest = load_manifest(manifest_path)
        assert len(manifest.train) == 2 and len(manifest.test) == 2
        first = read_events(manifest.train[0])
        assert first.label == 0  # classes shifted to 0-based
        assert first.t.max() < 30000
        second = read_events(manifest.train[1])
        assert second.label == 4
        assert second.t.min() >= 30000 and second.t.max() < 70000

    def test_manifest_json_shape(self, tmp_path):
        raw = tmp_path / "raw" / "DvsGesture"
        raw.mkdir(parents=True)
        write_aedat(raw / "u.aedat", [(10, 1, 1, 1)])
        (raw / "u_labels.csv").write_text("class,startTime_usec,endTime_usec\n2,0,100\n")
        (raw / "trials_to_train.txt").write_text("u.aedat\n")
        (raw / "trials_to_test.txt").write_text("u.aedat\n")
        manifest_path = dvsgesture.convert(tmp_path / "raw", tmp_path / "conv")
        data = json.loads(manifest_path.read_text())
        assert data["width"] == 128 and data["channels"] == 2
