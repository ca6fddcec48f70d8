import struct

import numpy as np
import pytest

from qcovpca import (
    ClassPairTask,
    HsiCube,
    SpectralDataset,
    flatten_cube,
    load_csv,
    load_npy,
    save_csv,
    select_pair,
    write_npy,
)


def npy_bytes(descr, shape, payload, version=b"\x01\x00", magic=b"\x93NUMPY"):
    header = f"{{'descr': '{descr}', 'fortran_order': False, 'shape': {shape}, }}"
    unpadded = 6 + 2 + 2 + len(header) + 1
    header = header + " " * (-unpadded % 64) + "\n"
    return magic + version + struct.pack("<H", len(header)) + header.encode() + payload


class TestLoadNpy:
    def test_reads_f8_matrix(self, tmp_path):
        payload = struct.pack("<4d", 1.0, 2.0, 3.0, 4.0)
        path = tmp_path / "a.npy"
        path.write_bytes(npy_bytes("<f8", "(2, 2)", payload))
        out = load_npy(path)
        assert out.dtype == np.float64
        np.testing.assert_array_equal(out, [[1.0, 2.0], [3.0, 4.0]])

    def test_empty_shape_accepted(self, tmp_path):
        path = tmp_path / "a.npy"
        path.write_bytes(npy_bytes("<f8", "(0,)", b""))
        out = load_npy(path)
        assert out.shape == (0,)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "a.npy"
        path.write_bytes(npy_bytes("<f8", "(1,)", struct.pack("<d", 1.0), magic=b"\x93NUMPZ"))
        with pytest.raises(ValueError, match="bad magic"):
            load_npy(path)

    def test_unsupported_version(self, tmp_path):
        path = tmp_path / "a.npy"
        path.write_bytes(npy_bytes("<f8", "(1,)", struct.pack("<d", 1.0), version=b"\x02\x00"))
        with pytest.raises(ValueError, match="version"):
            load_npy(path)

    def test_unsupported_dtype(self, tmp_path):
        path = tmp_path / "a.npy"
        path.write_bytes(npy_bytes("<c16", "(1,)", b"\x00" * 16))
        with pytest.raises(ValueError, match="dtype"):
            load_npy(path)

    def test_fortran_order_rejected(self, tmp_path):
        header = "{'descr': '<f8', 'fortran_order': True, 'shape': (1,), }"
        unpadded = 10 + len(header) + 1
        header = header + " " * (-unpadded % 64) + "\n"
        raw = b"\x93NUMPY\x01\x00" + struct.pack("<H", len(header)) + header.encode()
        path = tmp_path / "a.npy"
        path.write_bytes(raw + struct.pack("<d", 1.0))
        with pytest.raises(ValueError, match="fortran"):
            load_npy(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "a.npy"
        path.write_bytes(npy_bytes("<f8", "(2, 2)", struct.pack("<3d", 1.0, 2.0, 3.0)))
        with pytest.raises(ValueError, match="payload"):
            load_npy(path)

    def test_numpy_interop(self, tmp_path):
        arr = np.arange(12, dtype=np.float32).reshape(3, 4)
        ours = tmp_path / "ours.npy"
        theirs = tmp_path / "theirs.npy"
        write_npy(ours, arr)
        np.testing.assert_array_equal(np.load(ours), arr)
        np.save(theirs, arr)
        np.testing.assert_array_equal(load_npy(theirs), arr)


class TestRoundTrip:
    @pytest.mark.parametrize("dtype", ["<f8", "<f4", "u1", "i1", "<u2", "<i2"])
    def test_bytes_identical(self, tmp_path, dtype):
        rng = np.random.default_rng(hash(dtype) % 2**32)
        for ndim in (1, 2, 3):
            shape = tuple(int(d) for d in rng.integers(1, 5, size=ndim))
            if np.dtype(dtype).kind == "f":
                arr = rng.standard_normal(shape).astype(dtype)
            else:
                info = np.iinfo(dtype)
                arr = rng.integers(info.min, info.max, size=shape).astype(dtype)
            first = tmp_path / "first.npy"
            second = tmp_path / "second.npy"
            write_npy(first, arr)
            loaded = load_npy(first)
            assert loaded.dtype == np.dtype(dtype)
            assert loaded.shape == shape
            np.testing.assert_array_equal(loaded, arr)
            write_npy(second, loaded)
            assert first.read_bytes() == second.read_bytes()


class TestLoadCsv:
    def test_basic_parse(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("1.0,2.0,3\n4.0,5.0,10\n")
        ds = load_csv(path)
        np.testing.assert_array_equal(ds.samples, [[1.0, 2.0], [4.0, 5.0]])
        np.testing.assert_array_equal(ds.labels, [3, 10])
        assert ds.band_count == 2

    def test_header_skipped(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("b0,b1,label\n1.0,2.0,3\n4.0,5.0,10\n")
        ds = load_csv(path, has_header=True)
        assert ds.sample_count == 2

    def test_non_numeric_cell_names_position(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("1.0,2.0,3\n4.0,abc,10\n")
        with pytest.raises(ValueError, match="row 1, column 1"):
            load_csv(path)

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("1.0,2.0,3\n4.0,5.0\n")
        with pytest.raises(ValueError, match="row 1"):
            load_csv(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("")
        with pytest.raises(ValueError, match="empty"):
            load_csv(path)

    def test_non_integer_label(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("1.0,2.0,3.5\n4.0,5.0,10\n")
        with pytest.raises(ValueError, match="not an integer"):
            load_csv(path)

    def test_label_column_index(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("3,1.0,2.0\n10,4.0,5.0\n")
        ds = load_csv(path, label_column=0)
        np.testing.assert_array_equal(ds.labels, [3, 10])
        np.testing.assert_array_equal(ds.samples, [[1.0, 2.0], [4.0, 5.0]])

    def test_save_then_load(self, tmp_path):
        rng = np.random.default_rng(3)
        ds = SpectralDataset(rng.standard_normal((5, 3)), [1, 2, 1, 2, 1])
        path = tmp_path / "out.csv"
        save_csv(ds, path)
        back = load_csv(path, has_header=True)
        np.testing.assert_array_equal(back.samples, ds.samples)
        np.testing.assert_array_equal(back.labels, ds.labels)


class TestSpectralDataset:
    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="NaN"):
            SpectralDataset(np.array([[1.0, np.nan], [1.0, 2.0]]), [1, 2])

    def test_rejects_label_mismatch(self):
        with pytest.raises(ValueError, match="labels length"):
            SpectralDataset(np.ones((3, 2)), [1, 2])

    def test_rejects_tiny_shapes(self):
        with pytest.raises(ValueError, match="at least 2"):
            SpectralDataset(np.ones((1, 4)), [1])
        with pytest.raises(ValueError, match="at least 2"):
            SpectralDataset(np.ones((4, 1)), [1, 1, 2, 2])


class TestFlattenCube:
    def test_raster_order(self):
        data = np.arange(12, dtype=float).reshape(2, 2, 3)
        gt = np.array([[0, 2], [3, 2]])
        ds = flatten_cube(HsiCube(data, gt), {2, 3})
        np.testing.assert_array_equal(ds.labels, [2, 3, 2])
        np.testing.assert_array_equal(ds.samples[0], data[0, 1])
        np.testing.assert_array_equal(ds.samples[1], data[1, 0])
        np.testing.assert_array_equal(ds.samples[2], data[1, 1])

    def test_no_match_errors(self):
        data = np.ones((2, 2, 3))
        gt = np.array([[0, 2], [3, 2]])
        with pytest.raises(ValueError, match="no samples for requested classes"):
            flatten_cube(HsiCube(data, gt), {9})

    def test_unlabeled_always_dropped(self):
        data = np.ones((2, 2, 3))
        gt = np.array([[0, 2], [0, 2]])
        ds = flatten_cube(HsiCube(data, gt), {0, 2})
        assert ds.sample_count == 2

    def test_count_matches_ground_truth(self):
        rng = np.random.default_rng(11)
        gt = rng.integers(0, 5, size=(9, 7))
        data = rng.uniform(0.1, 1.0, size=(9, 7, 4))
        keep = {1, 3}
        ds = flatten_cube(HsiCube(data, gt), keep)
        assert ds.sample_count == int(np.isin(gt, list(keep)).sum())

    def test_spatial_mismatch_rejected(self):
        with pytest.raises(ValueError, match="spatial"):
            HsiCube(np.ones((2, 3, 4)), np.zeros((2, 2), dtype=int))


class TestSelectPair:
    def test_relabeling(self):
        ds = SpectralDataset(np.arange(6, dtype=float).reshape(3, 2), [3, 10, 3])
        pair = select_pair(ds, ClassPairTask(3, 10))
        np.testing.assert_array_equal(pair.labels, [0, 1, 0])
        np.testing.assert_array_equal(pair.samples, ds.samples)

    def test_same_class_task_rejected(self):
        with pytest.raises(ValueError, match="must differ"):
            ClassPairTask(3, 3)

    def test_missing_class(self):
        ds = SpectralDataset(np.ones((3, 2)), [3, 10, 3])
        with pytest.raises(ValueError, match="class 7 not present"):
            select_pair(ds, ClassPairTask(7, 10))

    def test_counts_preserved_and_order_kept(self):
        rng = np.random.default_rng(5)
        labels = rng.choice([2, 3, 10], size=50)
        labels[:3] = [3, 10, 3]  # ensure both classes exist
        ds = SpectralDataset(rng.standard_normal((50, 4)), labels)
        pair = select_pair(ds, ClassPairTask(3, 10))
        assert (pair.labels == 0).sum() == (labels == 3).sum()
        assert (pair.labels == 1).sum() == (labels == 10).sum()
        kept = np.isin(labels, [3, 10])
        np.testing.assert_array_equal(pair.samples, ds.samples[kept])

    def test_parse_notation(self):
        task = ClassPairTask.parse("3/10")
        assert (task.class_a, task.class_b) == (3, 10)
        assert str(task) == "3/10"
        with pytest.raises(ValueError, match="a/b"):
            ClassPairTask.parse("3-10")
