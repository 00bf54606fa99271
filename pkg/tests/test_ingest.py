import numpy as np
import pytest

from diffnet.ingest import ingest_csv, load_conditions, write_csv


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestIngestCsv:
    def test_well_formed(self, tmp_path):
        path = write(tmp_path, "a.csv", "x,y\n1,2\n3,4\n5,6\n")
        sample = ingest_csv(path)
        assert sample.n_samples == 3
        assert sample.n_variables == 2
        assert sample.variable_names == ("x", "y")
        assert sample.condition_label == "a"

    def test_explicit_label(self, tmp_path):
        path = write(tmp_path, "a.csv", "x,y\n1,2\n3,4\n")
        assert ingest_csv(path, "case").condition_label == "case"

    def test_nan_rejected_with_location(self, tmp_path):
        path = write(tmp_path, "a.csv", "x,y\n1,2\n3,NaN\n")
        with pytest.raises(ValueError, match="row 3, column 'y'"):
            ingest_csv(path)

    def test_inf_rejected(self, tmp_path):
        path = write(tmp_path, "a.csv", "x,y\n1,2\ninf,4\n")
        with pytest.raises(ValueError, match="row 3, column 'x'"):
            ingest_csv(path)

    def test_text_cell_rejected_with_location(self, tmp_path):
        path = write(tmp_path, "a.csv", "x,y\n1,2\n3,oops\n")
        with pytest.raises(ValueError, match="row 3, column 'y'.*'oops'"):
            ingest_csv(path)

    def test_ragged_row_rejected(self, tmp_path):
        path = write(tmp_path, "a.csv", "x,y\n1,2\n3\n")
        with pytest.raises(ValueError, match="row 3 has 1 fields"):
            ingest_csv(path)

    def test_duplicate_names_rejected(self, tmp_path):
        path = write(tmp_path, "a.csv", "x,x\n1,2\n3,4\n")
        with pytest.raises(ValueError, match="duplicate"):
            ingest_csv(path)

    def test_empty_file(self, tmp_path):
        path = write(tmp_path, "a.csv", "")
        with pytest.raises(ValueError, match="empty"):
            ingest_csv(path)

    def test_too_few_rows(self, tmp_path):
        path = write(tmp_path, "a.csv", "x,y\n1,2\n")
        with pytest.raises(ValueError, match="at least 2 data rows"):
            ingest_csv(path)


class TestLoadConditions:
    def test_aligned_headers_load(self, tmp_path):
        a = write(tmp_path, "a.csv", "x,y\n1,2\n3,4\n")
        b = write(tmp_path, "b.csv", "x,y\n5,6\n7,8\n")
        data = load_conditions([("case", a), ("control", b)])
        assert [d.condition_label for d in data] == ["case", "control"]

    def test_permuted_columns_rejected(self, tmp_path):
        a = write(tmp_path, "a.csv", "x,y\n1,2\n3,4\n")
        b = write(tmp_path, "b.csv", "y,x\n5,6\n7,8\n")
        with pytest.raises(ValueError, match="identical header"):
            load_conditions([("case", a), ("control", b)])

    def test_needs_two_conditions(self, tmp_path):
        a = write(tmp_path, "a.csv", "x,y\n1,2\n3,4\n")
        with pytest.raises(ValueError, match="at least 2"):
            load_conditions([("case", a)])


class TestWriteCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(5)
        from diffnet.correlation import SampleMatrix

        sample = SampleMatrix(
            rng.standard_normal((7, 3)), ("a", "b", "c"), "case"
        )
        path = str(tmp_path / "out.csv")
        write_csv(path, sample)
        loaded = ingest_csv(path, "case")
        assert np.array_equal(loaded.values, sample.values)
        assert loaded.variable_names == sample.variable_names
