"""Exact finite-N Bethe states.

Quantum numbers follow the fermionic convention: the lattice of allowed
numbers is fixed by the block edges and does not shift when particles are
added or removed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import AlignmentError, ConfigError, ConsistencyError, NonConvergenceError
from .model import BareCharge, ModelKind, ModelSpec

TWO_PI = 2.0 * np.pi
BETHE_TOL = 1e-12


@dataclass(frozen=True)
class FiniteState:
    """Solved Bethe state.

    ``residual`` is the max-norm of the Bethe equations divided by ``L``,
    i.e. measured in units of the counting function ``2 pi I / L``.
    """

    L: float
    I: np.ndarray
    lambdas: np.ndarray
    residual: float
    iterations: int
    history: tuple = field(default=(), compare=False)

    @property
    def N(self) -> int:
        return int(self.I.size)

    def to_dict(self) -> dict:
        return {"L": self.L, "I": self.I.tolist(), "lambdas": self.lambdas.tolist(),
                "residual": self.residual}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "FiniteState":
        return cls(float(d["L"]), np.asarray(d["I"], dtype=float),
                   np.asarray(d["lambdas"], dtype=float), float(d["residual"]), 0)

    @classmethod
    def from_json(cls, text: str) -> "FiniteState":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# quantum numbers


def _frac(x) -> Fraction:
    f = Fraction(x).limit_denominator(2)
    if f.denominator not in (1, 2) or abs(float(f) - float(x)) > 1e-12:
        raise ConfigError(f"quantum-number edge {x} is neither integer nor half-odd")
    return f


def quantum_numbers_from_blocks(blocks: Sequence, check_parity: bool = False) -> np.ndarray:
    """Filled numbers ``I_iL + 1/2, ..., I_iR - 1/2`` of every block.

    With ``check_parity`` the result must be half-odd for even N and integer
    for odd N (the bosonic Lieb-Liniger rule).
    """
    edges = [(_frac(a), _frac(b)) for a, b in blocks]
    if not edges:
        raise ConfigError("at least one block is required")
    lattice = {(2 * a) % 2 for pair in edges for a in pair}
    if len(lattice) != 1:
        raise ConfigError("block edges mix integers and half-odd integers")
    for a, b in edges:
        if not a < b:
            raise ConfigError(f"empty or reversed block ({a}, {b})")
    for (a0, b0), (a1, b1) in zip(edges, edges[1:]):
        if not b0 <= a1:
            raise ConfigError(f"blocks ({a0}, {b0}) and ({a1}, {b1}) overlap or are unsorted")
    out = []
    for a, b in edges:
        x = a + Fraction(1, 2)
        while x < b:
            out.append(float(x))
            x += 1
    I = np.array(out)
    if check_parity:
        half_odd = (2 * abs(Fraction(out[0]))) % 2 == 1
        if half_odd != (I.size % 2 == 0):
            raise ConfigError(f"N={I.size} requires {'half-odd' if I.size % 2 == 0 else 'integer'} "
                              "quantum numbers")
    return I


def _check_distinct(I: np.ndarray):
    if np.unique(I).size != I.size:
        raise ConfigError("quantum numbers must be distinct")


# ---------------------------------------------------------------------------
# Bethe equations


def bethe_residual(model: ModelSpec, L: float, I: np.ndarray, lam: np.ndarray) -> np.ndarray:
    diff = lam[:, None] - lam[None, :]
    return L * model.p0(lam) + model.theta(diff).sum(axis=1) - TWO_PI * I


def bethe_jacobian(model: ModelSpec, L: float, lam: np.ndarray) -> np.ndarray:
    Kd = model.K(lam[:, None] - lam[None, :])
    J = -Kd
    J[np.diag_indices_from(J)] += L * model.p0_prime(lam) + Kd.sum(axis=1)
    return J


def free_guess(model: ModelSpec, L: float, I: np.ndarray) -> np.ndarray:
    """Roots of the kernel-free equations ``L p0(lam) = 2 pi I``."""
    p = TWO_PI * np.asarray(I, dtype=float) / L
    if model.kind is ModelKind.XXZ:
        bound = np.pi - model.zeta
        p = np.clip(p, -0.999 * bound, 0.999 * bound)
    return model.p0_inverse(p)


def solve_bethe(model: ModelSpec, L: float, I, initial_guess=None, tol: float = BETHE_TOL,
                max_steps: int = 200, max_halvings: int = 10) -> FiniteState:
    """Damped Newton on ``L p0(lam_j) + sum_k theta(lam_j - lam_k) = 2 pi I_j``.

    Converged when the residual (in units of ``L``) is at most ``tol``.  If
    the line search can no longer reduce a residual that already sits at the
    floating-point floor of the equations, the iterate is accepted.
    """
    if not L > 0:
        raise ConfigError(f"system length must be positive, got {L}")
    I = np.sort(np.asarray(I, dtype=float))
    _check_distinct(I)
    if initial_guess is None:
        lam = free_guess(model, L, I)
    else:
        lam = np.sort(np.asarray(initial_guess, dtype=float))
        if lam.shape != I.shape:
            raise ConfigError("initial guess length differs from the number of quantum numbers")
    floor = 64 * np.finfo(float).eps * (np.max(np.abs(TWO_PI * I)) / L + np.pi + 1.0)

    r = bethe_residual(model, L, I, lam)
    err = np.max(np.abs(r)) / L if r.size else 0.0
    history = [err]
    for it in range(max_steps + 1):
        if err <= tol:
            return FiniteState(float(L), I, lam, float(err), it, tuple(history))
        if it == max_steps:
            break
        step = np.linalg.solve(bethe_jacobian(model, L, lam), r)
        t = 1.0
        for _ in range(max_halvings + 1):
            trial = lam - t * step
            r_new = bethe_residual(model, L, I, trial)
            e_new = np.max(np.abs(r_new)) / L
            if e_new < err:
                break
            t *= 0.5
        else:
            if err <= max(floor, 1e2 * tol):
                return FiniteState(float(L), I, lam, float(err), it, tuple(history))
            raise NonConvergenceError(f"line search failed at residual {err:.3e}", err, it)
        lam, r, err = trial, r_new, e_new
        history.append(err)
    raise NonConvergenceError(f"Bethe equations not converged after {max_steps} steps "
                              f"(residual {err:.3e})", err, max_steps)


def observables(model: ModelSpec, state: FiniteState, charge: BareCharge, n_max: int = 4,
                tol: float = 1e-9) -> dict:
    """Momentum (two ways), energy and power sums ``Q_n = sum lam^n``."""
    P_exact = TWO_PI * float(np.sum(state.I)) / state.L
    P_roots = float(np.sum(model.p0(state.lambdas)))
    if abs(P_exact - P_roots) > tol * max(state.N, 1):
        raise ConsistencyError(f"momentum mismatch {abs(P_exact - P_roots):.3e}")
    E = float(np.sum(charge.eps0(state.lambdas)))
    Q = [float(np.sum(state.lambdas**n)) for n in range(n_max + 1)]
    return {"P": P_exact, "P_roots": P_roots, "E": E, "Q": Q}


# ---------------------------------------------------------------------------
# excitations


@dataclass(frozen=True)
class ExcitationSpec:
    """Change of a block state.

    ``N`` and ``n`` hold one integer per Fermi point in the order
    (1L, 1R, 2L, 2R, ...).  ``impurities`` is a list of
    ``("particle" | "hole", quantum_number)``.
    """

    blocks: tuple
    N: tuple = ()
    n: tuple = ()
    impurities: tuple = ()

    def __post_init__(self):
        nb = len(self.blocks)
        N = tuple(int(x) for x in self.N) or (0,) * (2 * nb)
        n = tuple(int(x) for x in self.n) or (0,) * (2 * nb)
        if len(N) != 2 * nb or len(n) != 2 * nb:
            raise ConfigError("N and n need one entry per Fermi point")
        if any(x < 0 for x in n):
            raise ConfigError("particle-hole counts must be non-negative")
        imps = []
        for kind, q in self.impurities:
            if kind not in ("particle", "hole"):
                raise ConfigError(f"unknown impurity type {kind!r}")
            imps.append((kind, float(q)))
        object.__setattr__(self, "blocks", tuple((float(a), float(b)) for a, b in self.blocks))
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "impurities", tuple(imps))

    def new_blocks(self) -> list:
        out = []
        for i, (a, b) in enumerate(self.blocks):
            # I_ia -> I_ia + s_a N_ia
            out.append((a - self.N[2 * i], b + self.N[2 * i + 1]))
        return out

    def quantum_numbers(self) -> np.ndarray:
        blocks = self.new_blocks()
        I = list(quantum_numbers_from_blocks(blocks))
        occupied = set(I)
        for i, (a, b) in enumerate(blocks):
            for side, count in ((0, self.n[2 * i]), (1, self.n[2 * i + 1])):
                if count == 0:
                    continue
                src = a + 0.5 if side == 0 else b - 0.5
                dst = src - count if side == 0 else src + count
                if dst in occupied:
                    raise ConfigError(f"moving {src} by {count} slots lands on an occupied number")
                I.remove(src)
                I.append(dst)
                occupied = set(I)
        for kind, q in self.impurities:
            inside = any(a < q < b for a, b in blocks)
            if kind == "particle":
                if q in occupied or inside:
                    raise ConfigError(f"particle impurity {q} lies inside the occupied blocks")
                I.append(q)
            else:
                if q not in occupied or not inside:
                    raise ConfigError(f"hole impurity {q} is not an occupied block number")
                I.remove(q)
            occupied = set(I)
        lattice = {round((2 * x) % 2) for x in I}
        if len(lattice) > 1:
            raise ConfigError("excited quantum numbers leave the block lattice")
        I = np.sort(np.array(I, dtype=float))
        _check_distinct(I)
        return I


def image_rapidity(model: ModelSpec, state: FiniteState, q: float) -> float:
    """Rapidity with quantum number ``q`` against the background of ``state``.

    Solves ``L p0(x) + sum_k theta(x - lam_k) = 2 pi q``.  For an occupied
    ``q`` this returns its own root (up to the self-scattering term, which
    vanishes since theta(0) = 0); for a vacancy it is the position a hole
    would occupy in that state.
    """
    bg, L = state.lambdas, state.L

    def f(x):
        return L * model.p0(x) + np.sum(model.theta(x - bg)) - TWO_PI * q

    lo, hi = -1.0, 1.0
    for _ in range(60):
        if f(lo) < 0 < f(hi):
            return float(brentq(f, lo, hi, xtol=1e-15))
        lo, hi = 2 * lo, 2 * hi
    return float(free_guess(model, L, np.array([q]))[0])


def _guess_from(model: ModelSpec, base: FiniteState, I_new: np.ndarray) -> np.ndarray:
    """Warm start: reuse base roots for shared numbers, place the rest
    against the base background."""
    lookup = dict(zip(base.I.tolist(), base.lambdas.tolist()))
    guess = [lookup[q] if q in lookup else image_rapidity(model, base, q) for q in I_new.tolist()]
    return np.sort(np.array(guess))


def excited_state(model: ModelSpec, base: FiniteState, spec: ExcitationSpec,
                  tol: float = BETHE_TOL) -> FiniteState:
    I_new = spec.quantum_numbers()
    return solve_bethe(model, base.L, I_new, _guess_from(model, base, I_new), tol=tol)


def block_state(model: ModelSpec, blocks, L: float, tol: float = BETHE_TOL) -> FiniteState:
    return solve_bethe(model, L, quantum_numbers_from_blocks(blocks), tol=tol)


def discrete_shift(base: FiniteState, excited: FiniteState) -> dict:
    """``(lam_j - lam~_j) / (lam_{j+1} - lam_j)`` on the shared quantum numbers.

    The spacing uses the neighbouring base root within the same block
    (forward, or backward at the top of a block).
    """
    b_idx = {q: j for j, q in enumerate(base.I.tolist())}
    e_idx = {q: j for j, q in enumerate(excited.I.tolist())}
    removed = sorted(set(b_idx) - set(e_idx))
    added = sorted(set(e_idx) - set(b_idx))
    if len(removed) > 1 or len(added) > 1:
        raise AlignmentError(f"states differ by {len(removed)} holes and {len(added)} particles")
    shared = [q for q in base.I.tolist() if q in e_idx]
    lam_b = base.lambdas
    vals, lams = [], []
    for q in shared:
        j = b_idx[q]
        if q + 1 in b_idx:
            gap = lam_b[b_idx[q + 1]] - lam_b[j]
        elif q - 1 in b_idx:
            gap = lam_b[j] - lam_b[b_idx[q - 1]]
        else:
            raise AlignmentError(f"isolated quantum number {q} has no neighbour")
        vals.append((lam_b[j] - excited.lambdas[e_idx[q]]) / gap)
        lams.append(lam_b[j])
    return {
        "lambdas": np.array(lams),
        "values": np.array(vals),
        "I": np.array(shared),
        "lam_p": float(excited.lambdas[e_idx[added[0]]]) if added else None,
        "lam_h": float(lam_b[b_idx[removed[0]]]) if removed else None,
    }
