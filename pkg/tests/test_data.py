import numpy as np
import pytest

from blockfit.data import Dataset, TaskKind, ingest_csv, sst, sst_of


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestIngest:
    def test_basic_parse(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,0\n3,4,0\n5,6,1\n7,8,1\n")
        ds = ingest_csv(path, "y", TaskKind.REGRESSION)
        assert ds.feature_names == ["a", "b"]
        assert ds.n_rows == 4
        assert ds.n_features == 2
        np.testing.assert_array_equal(ds.column("a"), [1, 3, 5, 7])
        np.testing.assert_array_equal(ds.target, [0, 0, 1, 1])

    def test_row_order_preserved(self, tmp_path):
        path = write(tmp_path, "a,y\n9,1\n2,2\n5,3\n")
        ds = ingest_csv(path, "y", TaskKind.REGRESSION)
        np.testing.assert_array_equal(ds.column("a"), [9, 2, 5])

    def test_non_numeric_cell_names_row_and_column(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,0\n1,abc,1\n")
        with pytest.raises(ValueError, match=r"row 2.*column 'b'"):
            ingest_csv(path, "y", TaskKind.REGRESSION)

    def test_non_binary_target_rejected(self, tmp_path):
        path = write(tmp_path, "a,y\n1,0\n2,0.5\n")
        with pytest.raises(ValueError, match="non-binary target"):
            ingest_csv(path, "y", TaskKind.BINARY_CLASSIFICATION)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            ingest_csv(str(tmp_path / "nope.csv"), "y", TaskKind.REGRESSION)

    def test_missing_target_column(self, tmp_path):
        path = write(tmp_path, "a,b\n1,2\n")
        with pytest.raises(ValueError, match="missing target column"):
            ingest_csv(path, "y", TaskKind.REGRESSION)

    def test_nan_and_inf_rejected(self, tmp_path):
        for bad in ("nan", "inf", "-inf"):
            path = write(tmp_path, f"a,y\n{bad},1\n", name=f"{bad}.csv")
            with pytest.raises(ValueError, match="NaN or infinite"):
                ingest_csv(path, "y", TaskKind.REGRESSION)

    def test_empty_file_and_header_only(self, tmp_path):
        with pytest.raises(ValueError, match="empty data"):
            ingest_csv(write(tmp_path, "", name="e1.csv"), "y", TaskKind.REGRESSION)
        with pytest.raises(ValueError, match="empty data"):
            ingest_csv(write(tmp_path, "a,y\n", name="e2.csv"), "y", TaskKind.REGRESSION)

    def test_ragged_row(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,3\n1,2\n")
        with pytest.raises(ValueError, match="row 2 has 2 cells"):
            ingest_csv(path, "y", TaskKind.REGRESSION)


class TestDataset:
    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            Dataset(["a"], [np.array([1.0, 2.0])], np.array([1.0]), TaskKind.REGRESSION)

    def test_duplicate_names(self):
        cols = [np.array([1.0]), np.array([2.0])]
        with pytest.raises(ValueError, match="unique"):
            Dataset(["a", "a"], cols, np.array([1.0]), TaskKind.REGRESSION)

    def test_columns_read_only(self):
        ds = Dataset(["a"], [np.array([1.0, 2.0])], np.array([0.0, 1.0]), TaskKind.REGRESSION)
        with pytest.raises(ValueError):
            ds.columns[0][0] = 5.0

    def test_binary_target_enforced(self):
        with pytest.raises(ValueError, match="non-binary target"):
            Dataset(["a"], [np.array([1.0, 2.0])], np.array([0.0, 0.3]),
                    TaskKind.BINARY_CLASSIFICATION)

    def test_subset(self):
        ds = Dataset(["a"], [np.arange(5.0)], np.arange(5.0) % 2, TaskKind.REGRESSION)
        sub = ds.subset(np.array([0, 3]))
        np.testing.assert_array_equal(sub.column("a"), [0, 3])
        np.testing.assert_array_equal(sub.target, [0, 1])


class TestSst:
    def test_binary_example(self):
        ds = Dataset(["a"], [np.arange(4.0)], np.array([0.0, 0.0, 1.0, 1.0]), TaskKind.REGRESSION)
        assert sst(ds) == 1.0

    def test_constant_target_exactly_zero(self):
        # 0.1 is not exactly representable; the mean of repeats could drift
        y = np.full(7, 0.1)
        assert sst_of(y) == 0.0

    def test_single_point(self):
        assert sst_of(np.array([1.0])) == 0.0

    def test_two_pass_matches_accumulator_form(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = rng.integers(1, 300)
            y = rng.normal(rng.uniform(-100, 100), rng.uniform(0.01, 50), n)
            two_pass = sst_of(y)
            accum = float(y @ y) - n * y.mean() ** 2
            assert abs(two_pass - accum) <= 1e-9 * max(1.0, float(y @ y))
