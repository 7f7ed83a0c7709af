"""One test per acceptance criterion; each prints a single pass/fail line."""
import pytest

from isochrone.verification import CRITERIA


@pytest.fixture
def report(capsys):
    def _check(i):
        res = CRITERIA[i]()
        with capsys.disabled():
            print("\n" + res.line())
        assert res.passed, res.to_dict()
    return _check


def test_criterion_01_radial_period_isochrony(report):
    report(1)


def test_criterion_02_precession_depends_on_L_only(report):
    report(2)


def test_criterion_03_mixed_derivative(report):
    report(3)


def test_criterion_04_affine_invariance(report):
    report(4)


def test_criterion_05_classification_roundtrip(report):
    report(5)


def test_criterion_06_property_P(report):
    report(6)


def test_criterion_07_bolst_closure(report):
    report(7)


def test_criterion_08_bohlin(report):
    report(8)


def test_criterion_09_kepler_third_law(report):
    report(9)


def test_criterion_10_bertrand(report):
    report(10)


def test_criterion_11_singular_quadrature(report):
    report(11)


def test_criterion_12_orbit_integration(report):
    report(12)
