"""Named self-consistency checks on a dressed state.

Each check reports a measured residual and its tolerance.  ``fault`` lets
tests inject a known defect to confirm the suite catches it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dressed import DressedState, symmetric_matrices
from .model import ModelKind
from .quadrature import TWO_PI, build_grid, solve_fredholm

FD_STEP = 1e-4
FAULTS = ("mis_sign_U",)


@dataclass(frozen=True)
class InvariantResult:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tol)

    def to_dict(self) -> dict:
        return {"name": self.name, "residual": self.residual, "tol": self.tol, "passed": self.passed}


def _rel(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def _sample(dressed: DressedState, rng, count: int) -> np.ndarray:
    pts = dressed.points
    lo, hi = pts[0] - 0.5, pts[-1] + 0.5
    return rng.uniform(lo, hi, count)


def _interior(dressed: DressedState, rng, count: int) -> np.ndarray:
    out = []
    for a, b in dressed.seas.intervals:
        pad = 0.05 * (b - a)
        out.append(rng.uniform(a + pad, b - pad, count))
    return np.concatenate(out)


def run_invariants(dressed: DressedState, seed: int = 0, pairs: int = 10,
                   fault: str | None = None) -> list[InvariantResult]:
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; known: {FAULTS}")
    rng = np.random.default_rng(seed)
    st, model, grid = dressed, dressed.model, dressed.grid
    pts, s = st.points, st.signs
    out: list[InvariantResult] = []

    def add(name, residual, tol):
        out.append(InvariantResult(name, float(residual), float(tol)))

    lengths = np.array([b - a for a, b in st.seas.intervals])
    sums = np.array([w.sum() for w in grid.weights])
    add("quadrature weight sums", np.max(np.abs(sums - lengths) / lengths), 1e-13)

    # spectral self-convergence of the density
    fine = build_grid(st.seas, 2 * grid.order)
    rho_fine = solve_fredholm(fine, model, lambda x: model.p0_prime(x) / TWO_PI)
    probe = np.concatenate([pts, _interior(st, rng, 3)])
    add("density order doubling", np.max(np.abs(rho_fine(probe) - st.rho(probe))), 1e-10)

    floor = 0.0
    if model.kind is ModelKind.LIEB_LINIGER and model.c > 0:
        floor = np.max(np.maximum(0.0, model.p0_prime(grid.x) / TWO_PI - st.rho.values - 1e-12))
    add("density positivity", max(floor, max(0.0, -float(np.min(st.rho.values)))), 0.0)

    U = st.U.copy()
    if fault == "mis_sign_U":
        off = ~np.eye(U.shape[0], dtype=bool)
        U[off] *= -1.0
    eye = np.eye(U.shape[0])
    add("matrix-inverse pair", np.max(np.abs(U @ st.Uinv - eye)), 1e-8)
    add("inverse transpose relation", np.max(np.abs(st.Uinv - (s[:, None] * s[None, :]) * U.T)), 1e-8)

    lam = _sample(st, rng, pairs)
    lamp = _sample(st, rng, pairs)

    res = [abs(st.L(x, y) - st.L(y, x)) for x, y in zip(lam, lamp)]
    add("resolvent symmetry", max(res), 1e-9)

    # (1 - K/2pi)(1 + L) = 1 on the grid
    Km = model.K(grid.x[:, None] - grid.x[None, :]) / TWO_PI
    Lm = st.op.solve_values(Km)
    prod = (np.eye(grid.size) - st.op.kmat) @ (np.eye(grid.size) + Lm * grid.w[None, :])
    add("resolvent operator identity", np.max(np.abs(prod - np.eye(grid.size))), 1e-10)

    h = FD_STEP
    res = []
    for x, y in zip(lam, lamp):
        fd = (st.F(x, y + h) - st.F(x, y - h)) / (2 * h)
        res.append(abs(fd + st.L(x, y)))
    add("shift derivative in lambda'", max(res), 1e-6)

    res = []
    for x, y in zip(lam, lamp):
        lhs = st.shift(y).derivative(x)
        l_row = np.array([col(x) for col in st.L_cols])
        rhs = st.L(x, y) - np.sum(s * l_row * st.F_at_points(y))
        res.append(abs(lhs - rhs))
    add("shift derivative in lambda", max(res), 1e-8)

    res_sum, res_bil = [], []
    for x, y in zip(lam, lamp):
        fx, fy = st.F_at_points(x), st.F_at_points(y)
        res_sum.append(abs(st.F(x, y) + st.F(y, x) - np.sum(s * fx * fy)))
        gx = np.array([col(x) for col in st.F_cols])
        gy = np.array([col(y) for col in st.F_cols])
        res_bil.append(abs(np.sum(s * gx * gy) - np.sum(s * fx * fy)))
    add("shift sum rule", max(res_sum), 1e-8)
    add("shift bilinear symmetry", max(res_bil), 1e-8)

    res_b, res_z = [], []
    for y in lamp[:3]:
        fb, f = st.shift_bosonic(y), st.shift(y)
        res_b.append(np.max(np.abs(fb(lam) - (f(lam) - 0.5 * st.Z(lam)))))
        res_z.append(np.max(np.abs(2.0 * (f(lam) - fb(lam)) - st.Z(lam))))
    add("bosonic shift", max(res_b), 1e-9)
    add("dressed charge from shift", max(res_z), 1e-9)

    x_in = _interior(st, rng, 4)
    fd = (st.eps(x_in + h) - st.eps(x_in - h)) / (2 * h)
    add("dressed energy derivative", _rel(st.eps_prime(x_in), fd), 1e-6)

    fd = (st.momentum(x_in + h) - st.momentum(x_in - h)) / (2 * h)
    add("momentum derivative", _rel(fd, TWO_PI * st.rho(x_in)), 1e-6)
    add("momentum shift form", max(abs(st.momentum(x) - st.momentum_shift_form(x)) for x in lam), 1e-8)

    res = []
    for x in x_in[:4]:
        fd = (st.dispersion(x + h)[0] - st.dispersion(x - h)[0]) / (2 * h)
        res.append(_rel(st.dispersion(x)[1], fd))
    add("dispersion derivative", max(res), 1e-6)
    add("dispersion bare form", max(abs(st.dispersion(x)[0] - st.dispersion_bare_form(x)) for x in lam), 1e-8)
    add("dispersion roundtrip", max(abs(st.eps_from_dispersion(x) - st.eps(x)) for x in lam), 1e-8)
    et = np.array([st.dispersion(p)[0] for p in pts])
    add("Fermi-point dispersion system", max(np.max(np.abs(U @ st.eps_f - et)),
                                             np.max(np.abs(st.Uinv @ et - st.eps_f))), 1e-8)

    if st.seas.asymmetry() <= 1e-10:
        mats = symmetric_matrices(st)
        n = st.n
        add("symmetric Z from xi", np.max(np.abs(mats["Z"] - mats["xi"])), 1e-8)
        add("symmetric Z from quadrature", np.max(np.abs(mats["Z"] - mats["Z_quadrature"])), 1e-8)
        add("symmetric Z inverse", np.max(np.abs(mats["Z"] @ mats["Y"].T - np.eye(n))), 1e-8)
        res = [abs(st.F(-x, -y) + st.F(x, y)) for x, y in zip(lam, lamp)]
        add("symmetric shift reflection", max(res), 1e-9)
    return out


def all_passed(results) -> bool:
    return all(r.passed for r in results)
