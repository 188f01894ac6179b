"""
Tests for the CSV observation parser.
"""

import numpy as np
import pytest

from src.parsers.csv_parser import CSVParser, Dataset
from src.utils.errors import DataError


@pytest.fixture
def parser():
    return CSVParser()


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_reads_all_columns(parser, tmp_path):
    dataset = parser.parse(write(tmp_path, "y1,y2\n1.5,2\n-3,4e2\n"))
    assert dataset.columns == ["y1", "y2"]
    assert np.array_equal(dataset.values, [[1.5, 2.0], [-3.0, 400.0]])
    assert dataset.rows.tolist() == [1, 2]


def test_selects_columns(parser, tmp_path):
    dataset = parser.parse(write(tmp_path, "a, b, c\n1,2,3\n4,5,6\n"), columns=["c"])
    assert dataset.dim == 1
    assert dataset.values[:, 0].tolist() == [3.0, 6.0]


def test_missing_value_names_row(parser, tmp_path):
    with pytest.raises(DataError, match="row 2: missing value in column 'y'"):
        parser.parse(write(tmp_path, "y,z\n1.0,1\n,2\n"), columns=["y"])


def test_non_numeric_names_row(parser, tmp_path):
    with pytest.raises(DataError, match="row 3: non-numeric value 'abc'"):
        parser.parse(write(tmp_path, "y\n1\n2\nabc\n"))


def test_infinite_value_rejected(parser, tmp_path):
    with pytest.raises(DataError, match="row 1"):
        parser.parse(write(tmp_path, "y\ninf\n"))


def test_unknown_column(parser, tmp_path):
    with pytest.raises(DataError, match="unknown column"):
        parser.parse(write(tmp_path, "y\n1\n"), columns=["x"])


def test_too_many_columns(parser, tmp_path):
    with pytest.raises(DataError, match="one or two columns"):
        parser.parse(write(tmp_path, "a,b,c\n1,2,3\n"))


def test_missing_file(parser, tmp_path):
    with pytest.raises(DataError, match="not found"):
        parser.parse(tmp_path / "absent.csv")


def test_header_only(parser, tmp_path):
    with pytest.raises(DataError, match="no data rows"):
        parser.parse(write(tmp_path, "y\n"))


def test_empty_file(parser, tmp_path):
    with pytest.raises(DataError):
        parser.parse(write(tmp_path, ""))


def test_row_subset_is_seeded(parser, tmp_path):
    path = write(tmp_path, "y\n" + "\n".join(str(v) for v in range(100)) + "\n")
    first = parser.parse(path, n_rows=10, row_seed=3)
    second = parser.parse(path, n_rows=10, row_seed=3)
    assert first.n == 10
    assert np.array_equal(first.values, second.values)
    assert np.all(np.diff(first.rows) > 0)
    assert np.array_equal(first.values[:, 0], first.rows - 1.0)


def test_dataset_save_round_trip(parser, tmp_path):
    values = np.array([[0.1, 1.0 / 3.0], [2e-300, -7.5]])
    Dataset(values=values, columns=["y1", "y2"]).save(tmp_path / "out.csv")
    assert np.array_equal(parser.parse(tmp_path / "out.csv").values, values)


def test_dataset_shape_check():
    with pytest.raises(DataError):
        Dataset(values=np.zeros((3, 2)), columns=["y"])


def test_dataset_summary():
    summary = Dataset(values=np.array([1.0, 2.0, 3.0]), columns=["y"]).summary()
    assert summary["y"]["mean"] == pytest.approx(2.0)
    assert summary["y"]["count"] == 3.0
