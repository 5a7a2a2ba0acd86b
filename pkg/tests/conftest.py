import numpy as np
import pytest

from spheregrf import SpaceTimeModel, SpatialModel, TemporalCorrelation

# calibrated so that r(pi/2) = 0.05
EXP = SpatialModel("exp", {"phi0": 0.5243})
GCAUCHY = SpatialModel("gcauchy", {"phi1": 1.0, "alpha": 0.75, "beta": 2.5626})
MATERN = SpatialModel("matern", {"phi2": 0.7079, "nu": 0.25})
CATALOG = [EXP, GCAUCHY, MATERN]

ST_EXP = SpaceTimeModel(0.95, 0.25, TemporalCorrelation("exp", 1.8951))
ST_CAUCHY = SpaceTimeModel(0.95, 0.25, TemporalCorrelation("cauchy", 1.5250))


@pytest.fixture(params=CATALOG, ids=lambda m: m.kind)
def spatial_model(request):
    return request.param


def covariance_zscores(samples: np.ndarray, cov: np.ndarray) -> np.ndarray:
    """|empirical - true| / standard error for every covariance entry.

    ``samples`` is (n_draws, dim) from a zero-mean Gaussian; the standard
    error of the mean-known estimator is sqrt((S_aa S_bb + S_ab^2) / n).
    """
    n = samples.shape[0]
    emp = samples.T @ samples / n
    d = np.diag(cov)
    se = np.sqrt((np.outer(d, d) + cov ** 2) / n)
    return np.abs(emp - cov) / se


def stack(fields):
    return np.array([f.values.ravel() for f in fields])


_criteria: dict[int, tuple[str, list]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for key, value in report.user_properties:
        if key == "criterion":
            number, title = value
            _criteria.setdefault(number, (title, []))[1].append(report)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, reports = _criteria[number]
        ok = all(r.passed for r in reports)
        details = [d for r in reports for k, d in r.user_properties if k == "detail"]
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if details:
            line += "  [" + "; ".join(details) + "]"
        terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Tag a test with an acceptance criterion; call ``criterion.detail(text)`` to annotate."""
    marker = request.node.get_closest_marker("criterion")
    request.node.user_properties.append(("criterion", marker.args))

    class _Tag:
        @staticmethod
        def detail(text):
            request.node.user_properties.append(("detail", text))

    return _Tag
