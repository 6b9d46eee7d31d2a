"""Composite Gauss-Legendre grids and Nystrom solves on unions of Fermi seas.

Every integral equation in this package has the form

    f(lam) = g(lam) + sign * sum_i int_{lam_iL}^{lam_iR} dnu/2pi K(lam - nu) f(nu)

and is discretised on Gauss-Legendre nodes.  Off-grid values always come from
the equation itself (Nystrom interpolation), which keeps spectral accuracy up
to the interval endpoints where the Fermi-point data live.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
from numpy.polynomial.legendre import leggauss

from .errors import ConfigError, SingularSystemError
from .model import ModelSpec

TWO_PI = 2.0 * np.pi
DEFAULT_ORDER = 64
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class SeaConfig:
    """Ordered disjoint rapidity intervals ``[(lam_1L, lam_1R), ...]``.

    When the seas come from quantum-number blocks, ``blocks`` holds the
    edges ``I_ia`` and ``L`` the system length.
    """

    intervals: tuple
    blocks: tuple | None = None
    L: float | None = None

    def __post_init__(self):
        iv = tuple((float(a), float(b)) for a, b in self.intervals)
        if not iv:
            raise ConfigError("at least one Fermi sea is required")
        for a, b in iv:
            if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
                raise ConfigError(f"reversed or degenerate interval ({a}, {b})")
        for (a0, b0), (a1, b1) in zip(iv, iv[1:]):
            if not b0 < a1:
                raise ConfigError(f"intervals ({a0}, {b0}) and ({a1}, {b1}) overlap or are unsorted")
        object.__setattr__(self, "intervals", iv)
        if self.blocks is not None:
            object.__setattr__(self, "blocks", tuple((float(a), float(b)) for a, b in self.blocks))

    @property
    def n(self) -> int:
        return len(self.intervals)

    @property
    def fermi_points(self) -> np.ndarray:
        """Fermi rapidities ordered (1L, 1R, 2L, 2R, ...)."""
        return np.array(self.intervals, dtype=float).ravel()

    @property
    def signs(self) -> np.ndarray:
        """``s_a`` for each Fermi point: -1 for L, +1 for R."""
        return np.tile([-1.0, 1.0], self.n)

    def contains(self, lam: float) -> int | None:
        """Index of the sea strictly containing ``lam``, else None."""
        for i, (a, b) in enumerate(self.intervals):
            if a < lam < b:
                return i
        return None

    def asymmetry(self) -> float:
        """max_i |lam_iL + lam_{n+1-i,R}|; zero for a symmetric configuration."""
        pts = np.array(self.intervals)
        return float(np.max(np.abs(pts[:, 0] + pts[::-1, 1])))

    def to_dict(self) -> dict:
        out = {"intervals": [list(p) for p in self.intervals]}
        if self.blocks is not None:
            out["blocks"] = [list(b) for b in self.blocks]
            out["L"] = self.L
        return out


@dataclass(frozen=True)
class Grid:
    """Gauss-Legendre nodes and weights (units of d lambda) on each sea."""

    seas: SeaConfig
    order: int
    nodes: tuple
    weights: tuple
    x: np.ndarray = field(repr=False, compare=False)
    w: np.ndarray = field(repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.x.size

    def slices(self):
        """Index slice of each sea within the flat node array."""
        m = self.order
        return [slice(i * m, (i + 1) * m) for i in range(self.seas.n)]

    def integrate(self, values, sea: int | None = None) -> float:
        values = np.asarray(values, dtype=float)
        if sea is None:
            return float(self.w @ values)
        s = self.slices()[sea]
        return float(self.w[s] @ values[s])


def build_grid(seas: SeaConfig, order: int = DEFAULT_ORDER) -> Grid:
    """Map ``order``-point Gauss-Legendre rules affinely onto every sea."""
    if int(order) != order or order < 1:
        raise ConfigError(f"quadrature order must be a positive integer, got {order}")
    if not isinstance(seas, SeaConfig):
        seas = SeaConfig(seas)
    t, wt = leggauss(int(order))
    nodes, weights = [], []
    for a, b in seas.intervals:
        half, mid = 0.5 * (b - a), 0.5 * (a + b)
        nodes.append(half * t + mid)
        weights.append(half * wt)
    return Grid(seas, int(order), tuple(nodes), tuple(weights),
                np.concatenate(nodes), np.concatenate(weights))


def kernel_matrix(model: ModelSpec, lam, grid: Grid) -> np.ndarray:
    """Rows of ``w_k K(lam - nu_k) / 2pi`` for each ``lam``."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    return model.K(lam[:, None] - grid.x[None, :]) * (grid.w / TWO_PI)[None, :]


class NystromOperator:
    """LU-factorised ``1 - sign*K/2pi`` on a grid, shared across right-hand sides.

    The factorisation is read-only after construction, so distinct solves
    may run concurrently from several threads.
    """

    def __init__(self, grid: Grid, model: ModelSpec, sign: float = 1.0):
        if sign not in (1, -1, 1.0, -1.0):
            raise ValueError("sign must be +1 or -1")
        self.grid = grid
        self.model = model
        self.sign = float(sign)
        self.kmat = kernel_matrix(model, grid.x, grid)
        self.matrix = np.eye(grid.size) - self.sign * self.kmat
        anorm = np.linalg.norm(self.matrix, 1)
        self._lu = sla.lu_factor(self.matrix, check_finite=True)
        rcond, info = sla.lapack.dgecon(self._lu[0], anorm, norm="1")
        self.condition = np.inf if rcond == 0 else 1.0 / rcond
        if info != 0 or not self.condition < MAX_CONDITION:
            raise SingularSystemError(
                f"Nystrom matrix condition estimate {self.condition:.3e} exceeds {MAX_CONDITION:.0e}")

    def solve_values(self, rhs: np.ndarray) -> np.ndarray:
        f = sla.lu_solve(self._lu, rhs, check_finite=False)
        # one step of iterative refinement keeps the residual at roundoff level
        r = rhs - self.matrix @ f
        return f + sla.lu_solve(self._lu, r, check_finite=False)

    def residual(self, f: np.ndarray, rhs: np.ndarray) -> float:
        return float(np.max(np.abs(self.matrix @ f - rhs)))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Solution of a Nystrom-discretised equation, evaluable anywhere.

    ``driving`` (and optionally ``driving_prime``) are the inhomogeneous
    term and its derivative as callables of lambda.
    """

    values: np.ndarray
    grid: Grid
    model: ModelSpec
    driving: Callable
    driving_prime: Callable | None = None
    sign: float = 1.0
    residual: float = 0.0

    def __call__(self, lam):
        return nystrom_eval(self, self.model, lam)

    def derivative(self, lam):
        """d f / d lambda from differentiating the equation (needs ``driving_prime``)."""
        if self.driving_prime is None:
            raise ValueError("derivative needs the driving-term derivative")
        lam = np.asarray(lam, dtype=float)
        flat = np.atleast_1d(lam)
        kp = self.model.K_prime(flat[:, None] - self.grid.x[None, :]) * (self.grid.w / TWO_PI)
        out = np.asarray(self.driving_prime(flat), dtype=float) + self.sign * (kp @ self.values)
        return out.reshape(lam.shape) if lam.ndim else float(out[0])

    def integral(self, sea: int | None = None) -> float:
        return self.grid.integrate(self.values, sea)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return _combine(self, other, 1.0)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return _combine(self, other, -1.0)

    def __mul__(self, alpha: float) -> "GridFunction":
        g, gp = self.driving, self.driving_prime
        return GridFunction(alpha * self.values, self.grid, self.model,
                            lambda x: alpha * np.asarray(g(x)),
                            None if gp is None else (lambda x: alpha * np.asarray(gp(x))),
                            self.sign, abs(alpha) * self.residual)

    __rmul__ = __mul__


def _combine(a: GridFunction, b: GridFunction, s: float) -> GridFunction:
    if a.grid is not b.grid or a.sign != b.sign:
        raise ValueError("grid functions live on different grids")
    ga, gb = a.driving, b.driving
    pa, pb = a.driving_prime, b.driving_prime
    prime = None if pa is None or pb is None else _linear(pa, pb, s)
    return GridFunction(a.values + s * b.values, a.grid, a.model, _linear(ga, gb, s),
                        prime, a.sign, a.residual + b.residual)


def _linear(f: Callable, g: Callable, s: float) -> Callable:
    return lambda x: np.asarray(f(x)) + s * np.asarray(g(x))


def solve_fredholm(grid: Grid, model: ModelSpec, driving: Callable, sign: float = 1.0,
                   driving_prime: Callable | None = None,
                   operator: NystromOperator | None = None) -> GridFunction:
    """Solve ``f = g + sign * sum_i int (K/2pi) f`` by dense Nystrom.

    ``driving`` is a vectorised callable ``g(lambda)``.  Passing a prebuilt
    ``operator`` reuses its factorisation.
    """
    if operator is None:
        operator = NystromOperator(grid, model, sign)
    elif operator.grid is not grid or operator.sign != float(sign):
        raise ValueError("operator was built for a different grid or sign")
    rhs = np.asarray(driving(grid.x), dtype=float)
    if rhs.shape != grid.x.shape:
        rhs = np.broadcast_to(rhs, grid.x.shape).astype(float)
    f = operator.solve_values(rhs)
    res = operator.residual(f, rhs)
    return GridFunction(f, grid, model, driving, driving_prime, float(sign), res)


def nystrom_eval(solution: GridFunction, model: ModelSpec, lam):
    """Value of the solved function at arbitrary ``lam`` via the equation itself."""
    lam = np.asarray(lam, dtype=float)
    flat = np.atleast_1d(lam)
    g = np.broadcast_to(np.asarray(solution.driving(flat), dtype=float), flat.shape)
    out = g + solution.sign * (kernel_matrix(model, flat, solution.grid) @ solution.values)
    return out.reshape(lam.shape) if lam.ndim else float(out[0])


def constant(value: float) -> Callable:
    """Vectorised constant function (driving term helper)."""
    return lambda x: np.full(np.shape(x), float(value))


def tail_integral(func: Callable, edge: float, direction: int, nodes: int = 64,
                  tol: float = 1e-9, max_nodes: int = 4096, scale: float = 1.0):
    """``int_edge^{+-inf} func`` through lambda = edge +- scale*tan(u) on (0, pi/2).

    ``scale`` should be of the order of the decay length of ``func``.

    Doubles the node count until two successive estimates agree to ``tol``;
    returns ``(value, error_estimate)``.
    """
    from .errors import TailTruncationError

    def estimate(m):
        t, wt = leggauss(m)
        u = 0.25 * np.pi * (t + 1.0)
        wu = 0.25 * np.pi * wt
        lam = edge + direction * scale * np.tan(u)
        return float(scale * np.sum(wu * np.asarray(func(lam)) / np.cos(u) ** 2))

    prev = estimate(nodes)
    m, change = nodes, np.inf
    while m < max_nodes:
        m *= 2
        cur = estimate(m)
        change = abs(cur - prev)
        if change <= tol:
            return cur, change
        prev = cur
    raise TailTruncationError(
        f"tail integral from {edge} not converged to {tol:g} with {max_nodes} nodes "
        f"(last change {change:.3e})")


def oriented_grid(edges: Sequence[tuple], order: int):
    """Nodes/weights on possibly reversed intervals (weight sign follows orientation)."""
    t, wt = leggauss(int(order))
    xs, ws = [], []
    for a, b in edges:
        xs.append(0.5 * (b - a) * t + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * wt)
    return xs, ws
