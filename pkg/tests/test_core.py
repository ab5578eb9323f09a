import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from greenlime.core import (
    StandardizationParams,
    TabularDataset,
    fit_standardizer,
    inverse_standardize,
    read_csv,
    standardize,
)
from greenlime.errors import ConstantColumn, DimensionMismatch, EmptyData, NonFiniteInput, ValidationError


def test_population_std():
    p = fit_standardizer(TabularDataset([[1.0], [2.0], [3.0]], ["a"]))
    assert p.means[0] == pytest.approx(2.0)
    # sqrt(((1-2)^2 + 0 + (3-2)^2) / 3), divisor n
    assert p.stds[0] == pytest.approx(np.sqrt(2 / 3), rel=1e-15)
    assert p.stds[0] == pytest.approx(0.81650, abs=1e-5)


def test_symmetric_pair():
    p = fit_standardizer(np.array([[-1.0], [1.0]]))
    assert p.means[0] == 0.0 and p.stds[0] == 1.0


@pytest.mark.parametrize("c", [0.0, 0.1, -7.3, 1e6])
def test_constant_column_rejected(c):
    with pytest.raises(ConstantColumn) as info:
        fit_standardizer(np.array([[1.0, c], [2.0, c], [3.0, c]]))
    assert info.value.column == 1


def test_too_few_rows():
    with pytest.raises(EmptyData):
        TabularDataset([[1.0, 2.0]], None)


def test_nonfinite_rows():
    with pytest.raises(NonFiniteInput):
        TabularDataset([[1.0], [np.nan]], None)


def test_standardize_values():
    p = StandardizationParams([2.0], [np.sqrt(2 / 3)])
    assert standardize(p, [2.0])[0] == 0.0
    assert standardize(p, [3.0])[0] == pytest.approx(1.22474, abs=1e-5)
    q = StandardizationParams([0.0], [2.0])
    assert inverse_standardize(q, [0.0])[0] == 0.0
    assert inverse_standardize(q, [1.0])[0] == 2.0


def test_dimension_mismatch():
    p = StandardizationParams([0.0, 1.0], [1.0, 1.0])
    with pytest.raises(DimensionMismatch):
        standardize(p, [1.0])
    with pytest.raises(DimensionMismatch):
        inverse_standardize(p, [1.0, 2.0, 3.0])


def test_covariance_is_diagonal_variance():
    p = StandardizationParams([0.0, 0.0], [2.0, 3.0])
    np.testing.assert_array_equal(p.covariance, np.diag([4.0, 9.0]))


def test_immutable():
    p = StandardizationParams([0.0], [1.0])
    with pytest.raises(ValueError):
        p.means[0] = 5.0


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, (6, 3), elements=finite), arrays(np.float64, 3, elements=finite))
def test_round_trip(train, x):
    try:
        p = fit_standardizer(train)
    except ConstantColumn:
        return
    back = inverse_standardize(p, standardize(p, x))
    np.testing.assert_allclose(back, x, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(p.means).max()))


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, (20, 2), elements=st.floats(-100, 100, allow_nan=False)))
def test_standardized_columns_have_zero_mean_unit_std(train):
    try:
        p = fit_standardizer(train)
    except ConstantColumn:
        return
    if np.any(p.stds < 1e-6):
        return
    z = standardize(p, train)
    np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(z.std(axis=0), 1.0, atol=1e-12)


def test_read_csv(tmp_path):
    f = tmp_path / "train.csv"
    f.write_text("age,income\n1,10.5\n2,20\n\n3,30.25\n", encoding="utf-8")
    data = read_csv(f)
    assert data.feature_names == ("age", "income")
    np.testing.assert_array_equal(data.rows, [[1, 10.5], [2, 20], [3, 30.25]])


@pytest.mark.parametrize(
    "text",
    ["a,b\n1,2\n3\n", "a\n1\nx\n", "a\n1\n", ""],
)
def test_read_csv_rejects(tmp_path, text):
    f = tmp_path / "bad.csv"
    f.write_text(text, encoding="utf-8")
    with pytest.raises(ValidationError):
        read_csv(f)
