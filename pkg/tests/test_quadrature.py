import numpy as np
import pytest

from fermisea import ConfigError, SeaConfig, build_grid, make_model, solve_fredholm
from fermisea.errors import SingularSystemError, TailTruncationError
from fermisea.quadrature import NystromOperator, constant, nystrom_eval, tail_integral

TWO_PI = 2 * np.pi


def test_two_point_rule():
    g = build_grid(SeaConfig([(-1.0, 1.0)]), 2)
    assert np.allclose(g.x, [-1 / np.sqrt(3), 1 / np.sqrt(3)], atol=1e-15)
    assert np.allclose(g.w, [1.0, 1.0], atol=1e-15)


def test_two_interval_weights():
    g = build_grid(SeaConfig([(-1.0, 0.0), (0.5, 1.0)]), 16)
    assert g.size == 32
    assert g.weights[0].sum() == pytest.approx(1.0, abs=1e-13)
    assert g.weights[1].sum() == pytest.approx(0.5, abs=1e-13)
    for (a, b), nodes in zip(g.seas.intervals, g.nodes):
        assert np.all(nodes > a) and np.all(nodes < b) and np.all(np.diff(nodes) > 0)


def test_polynomial_exactness():
    g = build_grid(SeaConfig([(-1.0, 1.0)]), 8)
    assert g.integrate(g.x**4) == pytest.approx(0.4, abs=1e-14)
    assert g.integrate(g.x**15 + g.x**14) == pytest.approx(2 / 15, rel=1e-13)


@pytest.mark.parametrize("iv", [[(1.0, 0.0)], [(0.0, 0.0)], [(-1.0, 0.5), (0.2, 1.0)],
                                [(0.5, 1.0), (-1.0, 0.0)], []])
def test_bad_intervals(iv):
    with pytest.raises(ConfigError):
        SeaConfig(iv)


def test_bad_order():
    with pytest.raises(ConfigError):
        build_grid(SeaConfig([(-1.0, 1.0)]), 0)


def test_kernel_free_density_and_homogeneous():
    m = make_model("lieb_liniger", 1e9)
    g = build_grid(SeaConfig([(-1.0, 1.0)]), 32)
    f = solve_fredholm(g, m, lambda x: m.p0_prime(x) / TWO_PI)
    assert np.max(np.abs(f.values - 1 / TWO_PI)) < 1e-9
    assert f(5.0) == pytest.approx(1 / TWO_PI, abs=1e-9)
    z = solve_fredholm(g, make_model("lieb_liniger", 2.0), constant(0.0))
    assert np.all(z.values == 0.0)


def test_density_self_convergence():
    m = make_model("lieb_liniger", 2.0)
    seas = SeaConfig([(-1.0, 1.0)])
    drive = lambda x: m.p0_prime(x) / TWO_PI
    r64 = solve_fredholm(build_grid(seas, 64), m, drive)
    r128 = solve_fredholm(build_grid(seas, 128), m, drive)
    r256 = solve_fredholm(build_grid(seas, 256), m, drive)
    probe = np.linspace(-1, 1, 11)
    assert np.max(np.abs(r64(probe) - r128(probe))) < 1e-10
    assert abs(r64(0.0) - r256(0.0)) < 1e-10
    # independent fixed-point / adaptive-quadrature value
    assert r64(0.0) == pytest.approx(0.22442017969707342, abs=1e-12)


def test_spectral_convergence_rate():
    m = make_model("lieb_liniger", 2.0)
    seas = SeaConfig([(-1.0, 1.0)])
    drive = lambda x: m.p0_prime(x) / TWO_PI
    ref = solve_fredholm(build_grid(seas, 128), m, drive)(0.7)
    e8 = abs(solve_fredholm(build_grid(seas, 8), m, drive)(0.7) - ref)
    e16 = abs(solve_fredholm(build_grid(seas, 16), m, drive)(0.7) - ref)
    assert e16 < 1e-3 * e8 or e16 < 1e-14


def test_node_evaluation_matches_values():
    m = make_model("lieb_liniger", 2.0)
    g = build_grid(SeaConfig([(-1.0, -0.2), (0.3, 0.9)]), 64)
    f = solve_fredholm(g, m, lambda x: m.p0_prime(x) / TWO_PI)
    assert np.max(np.abs(nystrom_eval(f, m, g.x) - f.values)) < 1e-13
    assert f.residual <= 1e-12 * np.max(np.abs(1 / TWO_PI))


def test_even_solution_on_symmetric_seas():
    m = make_model("lieb_liniger", 2.0)
    g = build_grid(SeaConfig([(-1.1, -0.4), (0.4, 1.1)]), 64)
    f = solve_fredholm(g, m, lambda x: x**2)
    x = np.linspace(0, 2, 9)
    assert np.max(np.abs(f(x) - f(-x))) < 1e-12


def test_sign_argument_and_operator_reuse():
    m = make_model("lieb_liniger", 2.0)
    g = build_grid(SeaConfig([(-1.0, 1.0)]), 32)
    op = NystromOperator(g, m, -1)
    a = solve_fredholm(g, m, constant(1.0), sign=-1, operator=op)
    b = solve_fredholm(g, m, constant(1.0), sign=-1)
    assert np.array_equal(a.values, b.values)
    assert a(0.2) < 1.0
    with pytest.raises(ValueError):
        solve_fredholm(g, m, constant(1.0), sign=1, operator=op)


def test_singular_system_detected():
    # constant kernel with unit integral: the constant function is a null vector
    class FlatKernel:
        def K(self, x):
            return np.full(np.shape(x), TWO_PI / 2.0)

    g = build_grid(SeaConfig([(-1.0, 1.0)]), 8)
    with pytest.raises(SingularSystemError):
        NystromOperator(g, FlatKernel())


def test_tail_integral():
    val, _ = tail_integral(lambda x: 1.0 / (1.0 + x * x), 0.0, +1)
    assert val == pytest.approx(np.pi / 2, abs=1e-9)
    val, _ = tail_integral(lambda x: np.exp(x), 0.0, -1)
    assert val == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(TailTruncationError):
        tail_integral(lambda x: np.sin(x) ** 2, 0.0, +1, max_nodes=256)


def test_grid_function_arithmetic():
    m = make_model("lieb_liniger", 2.0)
    g = build_grid(SeaConfig([(-1.0, 1.0)]), 32)
    a = solve_fredholm(g, m, lambda x: x**2, driving_prime=lambda x: 2 * x)
    b = solve_fredholm(g, m, constant(1.0), driving_prime=constant(0.0))
    c = solve_fredholm(g, m, lambda x: x**2 - 3.0, driving_prime=lambda x: 2 * x)
    combo = a - 3.0 * b
    x = np.array([-2.0, 0.1, 1.7])
    assert np.max(np.abs(combo(x) - c(x))) < 1e-12
    assert np.max(np.abs(combo.derivative(x) - c.derivative(x))) < 1e-12
    assert (a + b).integral() == pytest.approx(a.integral() + b.integral(), abs=1e-13)
    with pytest.raises(ValueError):
        solve_fredholm(g, m, constant(1.0)).derivative(0.0)
