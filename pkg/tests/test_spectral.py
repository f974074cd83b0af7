import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from approxdct import spectral, transforms
from approxdct.spectral import (
    RowFilter,
    RowMismatch,
    distance_curve,
    error_energy,
    full_report,
    parseval_energy,
    transfer_function,
)

coeffs = arrays(np.float64, 16, elements=st.floats(-2, 2, allow_nan=False))


def test_transfer_function_at_zero(dct):
    assert transfer_function(RowFilter.from_spec(dct, 0), 0.0) == pytest.approx(4 + 0j)
    row = RowFilter(np.arange(16.0), 3)
    h = transfer_function(row, 0.0)
    assert h.imag == 0 and h.real == pytest.approx(120.0)


def test_transfer_function_matches_explicit_sum():
    h = np.linspace(-1, 1, 16)
    w = 0.7
    explicit = sum(h[n] * np.exp(-1j * n * w) for n in range(16))
    assert transfer_function(RowFilter(h, 0), w) == pytest.approx(explicit)


def test_row_8_transfer_functions_coincide(proposed, dct):
    grid = np.linspace(0, np.pi, 33)
    a = transfer_function(RowFilter.from_spec(proposed, 8), grid)
    c = transfer_function(RowFilter.from_spec(dct, 8), grid)
    np.testing.assert_allclose(a, c, atol=1e-14)


def test_distance_curve_basics(proposed, dct):
    grid = np.linspace(0, np.pi, 17)
    r = RowFilter.from_spec(dct, 5)
    assert np.all(distance_curve(r, r, grid) == 0)
    a = RowFilter.from_spec(proposed, 5)
    np.testing.assert_allclose(distance_curve(a, r, grid), distance_curve(r, a, grid))
    d = dct.matrix[5] - proposed.matrix[5]
    assert distance_curve(a, r, [0.0])[0] == pytest.approx(d.sum() ** 2)


def test_distance_curve_row_mismatch(proposed, dct):
    with pytest.raises(RowMismatch):
        distance_curve(RowFilter.from_spec(proposed, 1), RowFilter.from_spec(dct, 2), [0.0])


@pytest.mark.parametrize("name", ["proposed", "dct", "wht"])
def test_parseval_oracle_every_row(name):
    spec = transforms.get_transform(name)
    for m in range(16):
        assert abs(error_energy(spec, m) - parseval_energy(spec, m)) < 1e-6


@settings(max_examples=30, deadline=None)
@given(coeffs)
def test_parseval_oracle_random_rows(row):
    k = np.tile(row, (16, 1))
    spec = transforms.TransformSpec("rand", k, np.ones(16))
    assert abs(error_energy(spec, 4) - parseval_energy(spec, 4)) < 1e-6


def test_proposed_values(proposed):
    # closed forms: rows with 14, 12 and 16 nonzeros
    assert error_energy(proposed, 8) == pytest.approx(0, abs=1e-12)
    assert error_energy(proposed, 0) == pytest.approx(0, abs=1e-12)
    assert error_energy(proposed, 2) == pytest.approx(0.2095, abs=5e-4)
    assert full_report(proposed).total == pytest.approx(8.08, abs=0.01)


def test_zero_energy_iff_rows_equal(proposed, dct):
    for m in range(16):
        same = np.allclose(proposed.matrix[m], dct.matrix[m], atol=1e-12, rtol=0)
        assert (error_energy(proposed, m) < 1e-12) == same


def test_row_index_checked(proposed):
    with pytest.raises(IndexError):
        error_energy(proposed, 16)


def test_report_shape_and_grid(proposed):
    rep = full_report(proposed, grid_size=2)
    assert rep.grid.tolist() == [0.0, np.pi]
    assert rep.curves.shape == (16, 2)
    assert rep.total == pytest.approx(rep.energies.sum())
    assert (rep.energies >= 0).all()
    with pytest.raises(ValueError):
        full_report(proposed, grid_size=1)


def test_row_shuffle_changes_energies(proposed):
    k = proposed.kernel[[0, 2, 1] + list(range(3, 16))]
    shuffled = transforms.TransformSpec("shuffled", k, proposed.scaling[[0, 2, 1] + list(range(3, 16))])
    assert full_report(shuffled).total > full_report(proposed).total + 1


def test_quadrature_failure_reported(monkeypatch, proposed):
    def fake_quad(*args, **kwargs):
        return (0.0, 1.0, {}, "did not converge")

    monkeypatch.setattr(spectral.integrate, "quad", fake_quad)
    with pytest.raises(spectral.QuadratureFailure):
        error_energy(proposed, 1)
