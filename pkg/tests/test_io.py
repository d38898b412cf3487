import io

import numpy as np
import pytest
from numpy.testing import assert_allclose

from logo.estimators import ObservationMatrix
from logo.io import (
    format_observations,
    parse_observations,
    read_observations,
    write_observations,
)


def obs(rows, names):
    return ObservationMatrix(names, np.asarray(rows, dtype=float))


class TestParse:
    def test_basic(self):
        text = "a,b\n1.5,2\n-3,0.125\n"
        m = parse_observations(io.StringIO(text))
        assert m.names == ("a", "b")
        assert_allclose(m.data, [[1.5, 2.0], [-3.0, 0.125]])

    def test_bad_cell_reports_line(self):
        text = "a,b\n1,2\nx,4\n"
        with pytest.raises(ValueError, match="line 3"):
            parse_observations(io.StringIO(text))

    def test_ragged_row(self):
        text = "a,b\n1,2\n3\n"
        with pytest.raises(ValueError, match="line 3"):
            parse_observations(io.StringIO(text))

    def test_empty(self):
        with pytest.raises(ValueError):
            parse_observations(io.StringIO(""))

    def test_blank_lines_skipped(self):
        text = "a,b\n1,2\n\n3,4\n"
        m = parse_observations(io.StringIO(text))
        assert m.data.shape == (2, 2)


class TestRoundTrip:
    def test_bit_exact(self):
        rng = np.random.default_rng(0)
        m = obs(rng.standard_normal((30, 4)), ("w", "x", "y", "z"))
        back = parse_observations(io.StringIO(format_observations(m)))
        assert back.names == m.names
        assert np.array_equal(back.data, m.data)  # repr round-trips floats

    def test_file_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        m = obs(rng.standard_normal((10, 3)), ("a", "b", "c"))
        path = tmp_path / "obs.csv"
        write_observations(path, m)
        back = read_observations(path)
        assert np.array_equal(back.data, m.data)

    def test_format_layout(self):
        m = obs([[1.0, 2.5]], ("a", "b"))
        assert format_observations(m) == "a,b\n1.0,2.5\n"
