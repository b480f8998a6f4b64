import numpy as np
import pytest

from rarefaction2d.errors import NonFiniteValue
from rarefaction2d.fields import Field2D, Grid2D, dump_field, field_to_csv, load_field, load_field_csv


def make_field():
    g = Grid2D(-1.5, 2.0, 9, -3.0, 3.0, 12)
    X, Y = g.mesh()
    return Field2D(g, 0.1 + 0.2, np.sin(X) * np.exp(Y) / 3.0)


def test_grid_geometry():
    g = Grid2D.square(2.0, 9, center=(1.0, 0.0))
    assert g.h1 == pytest.approx(0.5) and g.shape == (9, 9)
    assert g.axis1()[0] == -1.0 and g.axis1()[-1] == 3.0
    m = g.boundary_mask()
    assert m.sum() == 4 * 8
    with pytest.raises(ValueError):
        Grid2D(0, 1, 4, 0, 1, 9)
    with pytest.raises(ValueError):
        Grid2D(1, 0, 9, 0, 1, 9)


def test_binary_round_trip_is_bit_exact(tmp_path):
    f = make_field()
    path = tmp_path / "f.f2d"
    dump_field(f, path)
    g = load_field(path)
    assert g.grid == f.grid and g.t == f.t
    assert np.array_equal(g.values, f.values)
    head = path.read_bytes().split(b"\n", 1)[0].decode()
    assert head.startswith("t=0.30000000000000004 n1=9 n2=12 b1=-1.5,2.0 b2=-3.0,3.0")
    assert path.stat().st_size == len(head) + 1 + 8 * 9 * 12


def test_csv_round_trip_is_bit_exact():
    f = make_field()
    text = field_to_csv(f, comment="rarefaction2d\nconfig abc")
    assert text.startswith("# rarefaction2d\n# config abc\n# t=")
    g = load_field_csv(text)
    assert np.array_equal(g.values, f.values) and g.grid == f.grid


def test_non_finite_rejected():
    g = Grid2D.square(1.0, 8)
    v = np.zeros(g.shape)
    v[3, 3] = np.nan
    with pytest.raises(NonFiniteValue):
        Field2D(g, 0.0, v)
    with pytest.raises(ValueError):
        Field2D(g, 0.0, np.zeros(10))


def test_bad_header(tmp_path):
    p = tmp_path / "bad.f2d"
    p.write_bytes(b"t=1 n1=x\n")
    with pytest.raises(ValueError):
        load_field(p)
