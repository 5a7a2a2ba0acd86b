import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheregrf import (SpaceTimeModel, SpatialModel, TemporalCorrelation, ValidationError,
                       calibrate_range, model_from_spec, parse_model_spec,
                       spacetime_correlation, spatial_correlation, variogram_from_correlation)

from conftest import CATALOG, EXP, GCAUCHY, MATERN, ST_CAUCHY, ST_EXP


def matern_mp(theta, phi, nu):
    x = mpmath.mpf(theta) / phi
    return float(2 ** (1 - nu) / mpmath.gamma(nu) * x ** nu * mpmath.besselk(nu, x))


def test_published_calibrations_give_005():
    assert spatial_correlation(EXP, np.pi / 2) == pytest.approx(0.05, abs=1e-3)
    assert spatial_correlation(GCAUCHY, np.pi / 2) == pytest.approx(0.05, abs=1e-3)
    assert spatial_correlation(MATERN, np.pi / 2) == pytest.approx(0.05, abs=1e-3)


@pytest.mark.parametrize("model", CATALOG, ids=lambda m: m.kind)
def test_unit_at_zero(model):
    assert spatial_correlation(model, 0.0) == 1.0


@pytest.mark.parametrize("nu", [0.1, 0.25, 0.5])
@pytest.mark.parametrize("x", [1e-8, 1e-4, 0.01, 0.3, 1.0, 4.0, 15.0, 40.0])
def test_matern_against_mpmath(nu, x):
    phi = np.pi / 40.0  # x * phi stays inside [0, pi]
    theta = x * phi
    model = SpatialModel("matern", {"phi2": phi, "nu": nu})
    assert spatial_correlation(model, theta) == pytest.approx(matern_mp(theta, phi, nu),
                                                              rel=1e-10)


def test_matern_half_is_exponential():
    m = SpatialModel("matern", {"phi2": 0.6, "nu": 0.5})
    th = np.linspace(0, np.pi, 50)
    np.testing.assert_allclose(m.correlation(th), np.exp(-th / 0.6), rtol=1e-12)


@pytest.mark.parametrize("kind, params", [
    ("exp", {"phi0": 0.0}), ("exp", {}), ("gcauchy", {"phi1": 1, "alpha": 1.2, "beta": 1}),
    ("gcauchy", {"phi1": 1, "alpha": 0.0, "beta": 1}), ("matern", {"phi2": 1, "nu": 0.6}),
    ("matern", {"phi2": 1, "nu": 0.0}), ("bogus", {}),
])
def test_parameter_ranges_enforced(kind, params):
    with pytest.raises(ValidationError):
        SpatialModel(kind, params)


def test_out_of_range_theta():
    with pytest.raises(ValidationError):
        spatial_correlation(EXP, 4.0)
    with pytest.raises(ValidationError):
        spatial_correlation(EXP, -0.1)


@pytest.mark.parametrize("model", CATALOG, ids=lambda m: m.kind)
def test_monotone_and_bounded(model):
    r = model.correlation(np.linspace(0, np.pi, 1000))
    assert np.all(np.diff(r) <= 0)
    assert np.all(np.abs(r) <= 1)


def test_spacetime_examples():
    assert spacetime_correlation(ST_EXP, 0.0, 0.0) == 1.0
    expected = (0.05 / (1 - 0.95 * np.exp(-3 / 1.8951))) ** 0.25
    assert spacetime_correlation(ST_EXP, 0.0, 3.0) == pytest.approx(expected, rel=1e-14)
    assert spacetime_correlation(ST_EXP, np.pi, 0.0) == pytest.approx((0.05 / 1.95) ** 0.25)


def test_spacetime_lag3_value():
    # the two temporal models agree at u = 3, but C(0, 3) is near 0.5, not 0.05
    c0 = spacetime_correlation(ST_EXP, 0.0, 3.0)
    c1 = spacetime_correlation(ST_CAUCHY, 0.0, 3.0)
    assert c0 == pytest.approx(c1, abs=1e-4)
    assert 0.45 < c0 < 0.51


def test_spacetime_margin_and_bounds():
    th = np.linspace(0, np.pi, 200)
    np.testing.assert_allclose(ST_EXP.correlation(th, 0.0),
                               (0.05 / (1 - 0.95 * np.cos(th))) ** 0.25, rtol=1e-14)
    T, U = np.meshgrid(th, np.linspace(0, 20, 100))
    for m in (ST_EXP, ST_CAUCHY):
        assert np.all(np.abs(m.correlation(T, U)) <= 1 + 1e-15)


def test_spacetime_validation():
    g = TemporalCorrelation("exp", 1.0)
    for delta in (0.0, 1.0, 1.5):
        with pytest.raises(ValidationError):
            SpaceTimeModel(delta, 0.25, g)
    with pytest.raises(ValidationError):
        SpaceTimeModel(0.5, 0.0, g)
    with pytest.raises(ValidationError):
        TemporalCorrelation("cauchy", -1.0)
    assert g(0.0) == 1.0


def test_variogram_from_correlation():
    assert variogram_from_correlation(EXP, 0.0) == 0.0
    assert variogram_from_correlation(EXP, np.pi / 2) == pytest.approx(0.95, abs=1e-3)
    m2 = SpatialModel("exp", {"phi0": 0.5243}, sill=2.0)
    assert variogram_from_correlation(m2, np.pi / 2) == pytest.approx(1.90, abs=2e-3)
    assert variogram_from_correlation(ST_EXP, 0.0, 0.0) == 0.0


def test_calibrate_exponential_closed_form():
    phi0 = calibrate_range("exp", {}, (np.pi / 2, 0.05))
    assert phi0 == pytest.approx(-(np.pi / 2) / np.log(0.05), rel=1e-12)
    assert phi0 == pytest.approx(0.5243, abs=1e-3)


def test_calibrate_cauchy_beta():
    beta = calibrate_range("gcauchy", {"alpha": 0.75, "phi1": 1.0}, (np.pi / 2, 0.05),
                           parameter="beta")
    assert beta == pytest.approx(2.5626, abs=1e-3)


def test_calibrate_matern_range():
    assert calibrate_range("matern", {"nu": 0.25}, (np.pi / 2, 0.05)) == pytest.approx(
        0.7079, abs=1e-3)


def test_calibrate_errors():
    with pytest.raises(ValidationError):
        calibrate_range("exp", {}, (np.pi / 2, 1.5))
    with pytest.raises(ValidationError):
        calibrate_range("exp", {}, (0.0, 0.5))
    with pytest.raises(ValidationError):
        calibrate_range("exp", {}, (np.pi / 2, 0.5), bracket=(10.0, 20.0))


@settings(max_examples=60, deadline=None)
@given(kind=st.sampled_from(["exp", "gcauchy", "matern"]),
       theta=st.floats(0.05, np.pi), r=st.floats(0.01, 0.95),
       alpha=st.floats(0.1, 1.0), beta=st.floats(0.2, 5.0), nu=st.floats(0.05, 0.5))
def test_calibration_round_trip(kind, theta, r, alpha, beta, nu):
    fixed = {"exp": {}, "gcauchy": {"alpha": alpha, "beta": beta}, "matern": {"nu": nu}}[kind]
    try:
        value = calibrate_range(kind, fixed, (theta, r))
    except ValidationError:
        return  # target outside what the bracket can reach
    key = {"exp": "phi0", "gcauchy": "phi1", "matern": "phi2"}[kind]
    model = SpatialModel(kind, {**fixed, key: value})
    assert model.correlation(theta) == pytest.approx(r, abs=1e-8)


def test_parse_model_spec():
    spec = parse_model_spec("model=gcauchy, phi1=1 alpha=0.75\nbeta=2.5626  # Cauchy\n")
    assert spec == {"model": "gcauchy", "phi1": "1", "alpha": "0.75", "beta": "2.5626"}
    m = model_from_spec(spec)
    assert m == GCAUCHY
    st_model = model_from_spec(parse_model_spec("model=st gkind=cauchy delta=0.95 tau=0.25 c1=1.525"))
    assert st_model == ST_CAUCHY
    assert model_from_spec({"model": "st-exp", "delta": 0.95, "tau": 0.25, "c0": 1.8951}) == ST_EXP
    assert model_from_spec({"model": "exp", "phi0": "0.5243", "sill": "2"}).sill == 2.0
    for bad in ("model=exp phi9=1", "model exp", ):
        with pytest.raises(ValidationError):
            parse_model_spec(bad)
    with pytest.raises(ValidationError):
        model_from_spec({"model": "st", "delta": 0.5})
    with pytest.raises(ValidationError):
        model_from_spec({"model": "exp", "phi0": "abc"})
