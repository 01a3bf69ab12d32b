import numpy as np
import pytest

from streamridge.errors import FormatError, InputError
from streamridge.features import (
    MAGIC,
    DatasetHeader,
    FeatureRecord,
    ProjectionBuffer,
    one_hot,
    one_hot_matrix,
    project,
    read_csv_dataset,
    read_dataset,
    read_header,
    write_dataset,
)

from conftest import buffer_with_weights, make_records


def brute_force_project(f, weights):
    # independent oracle: explicit dot products plus rectification
    out = np.zeros(weights.shape[1])
    for j in range(weights.shape[1]):
        acc = 0.0
        for i in range(weights.shape[0]):
            acc += f[i] * weights[i, j]
        out[j] = max(acc, 0.0)
    return out


class TestProject:
    def test_zero_input_gives_zero_output(self, small_buf):
        rec = FeatureRecord(0, 0, np.zeros(4, dtype=np.float32))
        assert np.array_equal(project(rec, small_buf), np.zeros(6))

    def test_negative_preactivation_rectified(self):
        buf = buffer_with_weights(-np.eye(3))
        rec = FeatureRecord(0, 0, np.array([1.0, 2.0, 3.0], dtype=np.float32))
        assert np.array_equal(project(rec, buf), np.zeros(3))

    def test_hand_matrix_product(self):
        buf = buffer_with_weights([[1.0, -1.0], [1.0, 1.0]])
        rec = FeatureRecord(0, 0, np.array([1.0, 2.0], dtype=np.float32))
        out = project(rec, buf)
        assert np.array_equal(out, [3.0, 1.0])
        assert np.allclose(out, brute_force_project([1.0, 2.0], buf.weights))

    def test_matches_brute_force_on_random_inputs(self, rng):
        buf = ProjectionBuffer(d_feat=5, d_buf=7, seed=3)
        for _ in range(10):
            f = rng.standard_normal(5)
            assert np.allclose(buf.project(f), brute_force_project(f, buf.weights))

    def test_output_nonnegative(self, rng, small_buf):
        out = small_buf.project(rng.standard_normal((50, 4)))
        assert out.shape == (50, 6)
        assert (out >= 0).all()

    def test_dimension_mismatch_rejected(self, small_buf):
        rec = FeatureRecord(0, 0, np.zeros(3, dtype=np.float32))
        with pytest.raises(InputError):
            project(rec, small_buf)

    def test_deterministic_and_pure(self, rng, small_buf):
        f = rng.standard_normal(4)
        a = small_buf.project(f)
        b = small_buf.project(f)
        assert np.array_equal(a, b)

    def test_seeded_reproducibility(self, rng):
        b1 = ProjectionBuffer(d_feat=8, d_buf=16, seed=99)
        b2 = ProjectionBuffer(d_feat=8, d_buf=16, seed=99)
        assert np.array_equal(b1.weights, b2.weights)
        f = rng.standard_normal((20, 8))
        assert np.array_equal(b1.project(f), b2.project(f))

    def test_weights_frozen(self, small_buf):
        with pytest.raises(ValueError):
            small_buf.weights[0, 0] = 1.0

    def test_scale_controls_weight_std(self):
        wide = ProjectionBuffer(d_feat=400, d_buf=500, seed=5, scale=2.0)
        # weight std should be close to scale / sqrt(d_feat)
        assert wide.weights.std() == pytest.approx(2.0 / 20.0, rel=0.05)


class TestOneHot:
    def test_first_of_two(self):
        assert np.array_equal(one_hot(0, 2), [1.0, 0.0])

    def test_third_of_six(self):
        assert np.array_equal(one_hot(2, 6), [0, 0, 1, 0, 0, 0])

    @pytest.mark.parametrize("label,C", [(0, 2), (3, 4), (9, 10)])
    def test_sums_to_one(self, label, C):
        assert one_hot(label, C).sum() == 1.0

    def test_out_of_range_rejected(self):
        with pytest.raises(InputError):
            one_hot(2, 2)
        with pytest.raises(InputError):
            one_hot(-1, 2)

    def test_matrix_stacks_rows(self):
        m = one_hot_matrix([1, 0, 2], 3)
        assert np.array_equal(m, [[0, 1, 0], [1, 0, 0], [0, 0, 1]])


class TestBinaryFormat:
    def test_round_trip_identity(self, tmp_path, rng):
        path = tmp_path / "data.feat"
        records = make_records(
            [0, 1, 1], [0, 0, 1], rng.standard_normal((3, 4)).astype(np.float32)
        )
        header = write_dataset(path, 4, 2, records)
        assert header.num_records == 3
        rheader, riter = read_dataset(path)
        loaded = list(riter)
        assert rheader == header
        assert len(loaded) == 3
        for orig, back in zip(records, loaded):
            assert back.label == orig.label
            assert back.task_id == orig.task_id
            # stored as f32; payload must round-trip bit-exactly
            assert np.array_equal(back.vector, orig.vector)

    def test_double_round_trip_byte_identical(self, tmp_path, rng):
        p1, p2 = tmp_path / "a.feat", tmp_path / "b.feat"
        records = make_records([1, 0], [0, 0], rng.standard_normal((2, 3)))
        write_dataset(p1, 3, 2, records)
        _, riter = read_dataset(p1)
        write_dataset(p2, 3, 2, list(riter))
        assert p1.read_bytes() == p2.read_bytes()

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.feat"
        path.write_bytes(b"")
        with pytest.raises(FormatError):
            read_header(path)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.feat"
        path.write_bytes(b"NOPE" + b"\x00" * 20)
        with pytest.raises(FormatError, match="magic"):
            read_header(path)

    def test_truncation_detected_with_offset(self, tmp_path, rng):
        path = tmp_path / "trunc.feat"
        records = make_records(
            [0, 1, 0, 1, 0], [0] * 5, rng.standard_normal((5, 4))
        )
        write_dataset(path, 4, 2, records)
        # drop the last record: header still promises 5
        full = path.read_bytes()
        record_bytes = 8 + 4 * 4
        path.write_bytes(full[: len(full) - record_bytes])
        _, riter = read_dataset(path)
        with pytest.raises(FormatError, match="truncated") as excinfo:
            list(riter)
        assert excinfo.value.offset is not None

    def test_magic_constant(self, tmp_path):
        path = tmp_path / "m.feat"
        write_dataset(path, 2, 2, make_records([0], [0], [[1.0, 2.0]]))
        assert path.read_bytes()[:4] == MAGIC

    def test_header_validation(self):
        with pytest.raises(InputError):
            DatasetHeader(d_feat=4, num_classes=1, num_records=0)
        with pytest.raises(InputError):
            DatasetHeader(d_feat=0, num_classes=2, num_records=0)

    def test_write_rejects_bad_records(self, tmp_path):
        with pytest.raises(InputError):
            write_dataset(
                tmp_path / "x.feat", 2, 2, make_records([5], [0], [[1.0, 2.0]])
            )
        with pytest.raises(InputError):
            write_dataset(
                tmp_path / "y.feat",
                2,
                2,
                make_records([0], [0], [[np.inf, 2.0]]),
            )


class TestCsvFallback:
    def test_tiny_fixture(self, tmp_path):
        path = tmp_path / "tiny.csv"
        path.write_text("0,0,1.5,2.5\n1,0,-1.0,0.0\n1,1,0.5,0.5\n")
        header, records = read_csv_dataset(path)
        assert header.d_feat == 2
        assert header.num_classes == 2
        assert header.num_records == 3
        assert records[0].label == 0
        assert np.allclose(records[0].vector, [1.5, 2.5])
        assert records[2].task_id == 1

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("0,0,1.0,2.0\n1,0,1.0\n")
        with pytest.raises(FormatError):
            read_csv_dataset(path)

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "none.csv"
        path.write_text("")
        with pytest.raises(FormatError):
            read_csv_dataset(path)
