import json

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from fermisea import (BareCharge, SeaConfig, SpectrumRequest, build_grid, dress, finite_size_delta,
                      make_model, observables, quantum_numbers_from_blocks, solve_bethe,
                      symmetric_delta)
from fermisea.spectrum import points_to_symmetric

TWO_PI = 2 * np.pi
couplings = st.floats(0.3, 50.0)
angles = st.floats(0.1, np.pi - 0.1)


@st.composite
def sea_configs(draw, max_seas=3):
    n = draw(st.integers(1, max_seas))
    cuts = sorted(draw(st.lists(st.floats(-3, 3), min_size=2 * n, max_size=2 * n, unique=True)))
    cuts = np.array(cuts)
    if np.min(np.diff(cuts)) < 0.05:
        cuts = np.linspace(-2, 2, 2 * n)
    return [(float(cuts[2 * i]), float(cuts[2 * i + 1])) for i in range(n)]


@given(sea_configs(), st.integers(4, 40))
def test_weight_sums(seas, order):
    g = build_grid(SeaConfig(seas), order)
    for (a, b), w in zip(seas, g.weights):
        assert abs(w.sum() - (b - a)) <= 1e-13 * (b - a)


@given(st.one_of(couplings.map(lambda c: make_model("lieb_liniger", c)),
                 angles.map(lambda z: make_model("xxz", z))),
       st.lists(st.floats(-5, 5), min_size=1, max_size=10))
def test_kernel_parity(model, xs):
    x = np.array(xs)
    assert np.allclose(model.theta(-x), -model.theta(x), atol=1e-15)
    assert np.allclose(model.K(-x), model.K(x), atol=1e-15)
    assert np.allclose(model.K_prime(-x), -model.K_prime(x), atol=1e-15)
    assert np.allclose(model.p0(-x), -model.p0(x), atol=1e-15)


@given(st.lists(st.integers(1, 6), min_size=2, max_size=8), st.integers(-20, 20), st.booleans())
def test_quantum_number_count(gaps, start, half):
    edges = np.cumsum([start] + gaps).astype(float) + (0.5 if half else 0.0)
    blocks = [(edges[2 * i], edges[2 * i + 1]) for i in range(len(edges) // 2)]
    I = quantum_numbers_from_blocks(blocks)
    assert I.size == sum(b - a for a, b in blocks)
    assert np.all(np.diff(I) > 0)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(sea_configs(), couplings)
def test_matrix_inverse_pair(seas, c):
    # resolve the kernel width: about ten nodes per c across the widest sea
    width = max(b - a for a, b in seas)
    order = int(min(256, max(48, 12 * width / c)))
    stt = dress(make_model("lieb_liniger", c), BareCharge.monomial(2), seas, order)
    s = stt.signs
    assert np.max(np.abs(stt.U @ stt.Uinv - np.eye(s.size))) < 1e-8
    assert np.max(np.abs(stt.Uinv - np.outer(s, s) * stt.U.T)) < 1e-8
    assert np.all(stt.rho.values > 0)


_SYM = {}


def _sym_state():
    if not _SYM:
        _SYM["st"] = dress(make_model("lieb_liniger", 2.0), BareCharge.monomial(2), [(-1.1, -0.4), (0.4, 1.1)])
    return _SYM["st"]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=4, max_size=4), st.lists(st.integers(0, 3), min_size=4, max_size=4),
       st.floats(20, 1000))
def test_symmetric_equals_general(N, n, L):
    stt = _sym_state()
    Nt, Dt = points_to_symmetric(N, 2)
    a = finite_size_delta(stt, SpectrumRequest(N, n), L).delta
    b = symmetric_delta(stt, Nt, Dt, n, L).delta
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=4, max_size=4), st.lists(st.integers(-4, 4), min_size=4, max_size=4))
def test_first_order_additive(N1, N2):
    stt = _sym_state()
    f = lambda N: finite_size_delta(stt, SpectrumRequest(N), 100.0).dE1
    assert abs(f(np.add(N1, N2)) - f(N1) - f(N2)) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.sets(st.integers(-15, 15), min_size=1, max_size=12), couplings)
def test_momentum_is_exact(Iset, c):
    m = make_model("lieb_liniger", c)
    I = np.array(sorted(Iset), dtype=float) + 0.5
    state = solve_bethe(m, 25.0, I)
    obs = observables(m, state, BareCharge.monomial(2))
    assert abs(obs["P"] - TWO_PI * I.sum() / 25.0) < 1e-12
    assert np.all(np.diff(state.lambdas) > 0)
    assert state.residual <= 1e-12


@given(st.dictionaries(st.text(min_size=1, max_size=5),
                       st.one_of(st.floats(allow_nan=False, allow_infinity=False), st.integers())))
def test_encode_is_valid_json(d):
    from fermisea.cli import encode
    back = json.loads(encode(d))
    for k, v in d.items():
        if isinstance(v, float):
            assert abs(back[k] - v) <= 1e-11 * abs(v) + 1e-300
        else:
            assert back[k] == v
