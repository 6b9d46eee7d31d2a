import numpy as np
import pytest

from fermisea import BareCharge, DomainError, RangeError, make_model
from fermisea.model import eval_bare, eval_kernels


def test_lieb_liniger_kernels_closed_form():
    m = make_model("lieb_liniger", 2.0)
    k = eval_kernels(m, 1.0)
    assert k["p0"] == 1.0 and k["p0_prime"] == 1.0
    assert k["theta"] == pytest.approx(2 * np.arctan(0.5), abs=1e-15)
    assert k["K"] == pytest.approx(4 / 5, abs=1e-15)
    assert k["K_prime"] == pytest.approx(-8 / 25, abs=1e-15)


def test_kernel_is_theta_derivative():
    for m in (make_model("lieb_liniger", 0.7), make_model("xxz", 1.1)):
        x = np.linspace(-3, 3, 13)
        h = 1e-5
        fd = (m.theta(x + h) - m.theta(x - h)) / (2 * h)
        assert np.max(np.abs(fd - m.K(x))) < 1e-8
        fd = (m.K(x + h) - m.K(x - h)) / (2 * h)
        assert np.max(np.abs(fd - m.K_prime(x))) < 1e-8
        fd = (m.p0(x + h) - m.p0(x - h)) / (2 * h)
        assert np.max(np.abs(fd - m.p0_prime(x))) < 1e-8


def test_xx_point_has_zero_scattering():
    m = make_model("xxz", np.pi / 2)
    x = np.linspace(-2, 2, 9)
    assert np.all(m.theta(x) == 0.0) and np.all(m.K(x) == 0.0) and np.all(m.K_prime(x) == 0.0)
    assert m.delta == 0.0


def test_xxz_momentum_inverse_roundtrip():
    m = make_model("xxz", np.pi / 3)
    lam = np.linspace(-2, 2, 11)
    assert np.max(np.abs(m.p0_inverse(m.p0(lam)) - lam)) < 1e-12
    with pytest.raises(DomainError):
        m.p0_inverse(np.pi)


@pytest.mark.parametrize("kind,g", [("lieb_liniger", 0.0), ("lieb_liniger", -1.0),
                                    ("xxz", 0.0), ("xxz", np.pi), ("xxz", 4.0), ("other", 1.0)])
def test_bad_couplings(kind, g):
    with pytest.raises(DomainError):
        make_model(kind, g)


def test_polynomial_charge():
    ch = BareCharge.polynomial([1.0, 0.0, 2.0])
    assert eval_bare(ch, 3.0) == {"eps0": 19.0, "eps0_prime": 12.0}
    assert BareCharge.monomial(0).eps0_prime(2.0) == 0.0
    assert ch.scaled(2.0).beta == (2.0, 0.0, 4.0)
    assert ch.is_even() and not BareCharge.monomial(3).is_even()


def test_xxz_energy_charge_derivative():
    ch = BareCharge.xxz_energy(1.0)
    x = np.linspace(-2, 2, 9)
    h = 1e-5
    fd = (ch.eps0(x + h) - ch.eps0(x - h)) / (2 * h)
    assert np.max(np.abs(fd - ch.eps0_prime(x))) < 1e-8
    assert np.allclose(ch.scaled(3.0).eps0(x), 3 * ch.eps0(x))


def test_custom_charge_range():
    lam = np.linspace(-2, 2, 41)
    ch = BareCharge.tabulated(lam, lam**2)
    assert ch.eps0(0.5) == pytest.approx(0.25, abs=1e-3)
    with pytest.raises(RangeError):
        ch.eps0(3.0)
