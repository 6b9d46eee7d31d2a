"""Order-1/L energy predictions for split Fermi seas."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dressed import DressedState
from .errors import ConfigError, ParityError, PlacementError, SymmetryError
from .quadrature import TWO_PI, GridFunction


@dataclass(frozen=True)
class SpectrumRequest:
    """Excitation on top of the sea state.

    ``N`` and ``n`` have one entry per Fermi point (1L, 1R, 2L, ...);
    ``impurities`` is a list of ``("particle" | "hole", rapidity)``.
    """

    N: tuple = ()
    n: tuple = ()
    impurities: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "N", tuple(int(x) for x in self.N))
        object.__setattr__(self, "n", tuple(int(x) for x in self.n))
        if any(x < 0 for x in self.n):
            raise ConfigError("particle-hole counts must be non-negative")
        imps = []
        for kind, lam in self.impurities:
            if kind not in ("particle", "hole"):
                raise ConfigError(f"unknown impurity type {kind!r}")
            imps.append((kind, float(lam)))
        object.__setattr__(self, "impurities", tuple(imps))

    def arrays(self, n_points: int):
        N = np.array(self.N or (0,) * n_points, dtype=float)
        n = np.array(self.n or (0,) * n_points, dtype=float)
        if N.size != n_points or n.size != n_points:
            raise ConfigError(f"request needs {n_points} entries per list, got N={N.size}, n={n.size}")
        return N, n

    def to_dict(self) -> dict:
        return {"N": list(self.N), "n": list(self.n),
                "impurities": [{"type": k, "lambda": v} for k, v in self.impurities]}


@dataclass(frozen=True)
class SpectrumReport:
    extensive: float
    casimir: float
    dE1: float
    dE2: float
    per_point: list = field(default_factory=list)
    impurity: dict | None = None

    @property
    def delta(self) -> float:
        return self.dE1 + self.dE2

    @property
    def total(self) -> float:
        return self.extensive + self.casimir + self.dE1 + self.dE2

    def to_dict(self) -> dict:
        out = {"extensive": self.extensive, "casimir": self.casimir, "dE1": self.dE1,
               "dE2": self.dE2, "total": self.total, "per_point": self.per_point}
        if self.impurity is not None:
            out["impurity"] = self.impurity
        return out


def bulk_energy(dressed: DressedState, L: float) -> dict:
    """``L sum int eps0 rho`` and the Casimir term built from ``eps'`` (not ``eps~'``)."""
    ext = L * dressed.energy_density()
    cas = -float(np.sum(dressed.signs * dressed.eps_prime_f / dressed.rho_f)) / (24.0 * L)
    return {"extensive": float(ext), "casimir": cas}


def _assemble(dressed: DressedState, N_eff, n, L, extra_first=0.0, bulk=None, impurity=None):
    s = dressed.signs
    m = dressed.U.T @ N_eff  # m_ia = sum_jb U_{jb,ia} N_jb
    first = dressed.eps_tilde_f * N_eff
    second = (TWO_PI / L) * s * dressed.v_tilde * (n + 0.5 * m * m)
    per_point = []
    for p, fp in enumerate(dressed.fermi):
        per_point.append({"i": fp.i, "a": fp.a, "N": float(N_eff[p]), "n": float(n[p]),
                          "m": float(m[p]), "first": float(first[p]), "second": float(second[p])})
    ext = cas = 0.0
    if bulk is not None:
        ext, cas = bulk["extensive"], bulk["casimir"]
    return SpectrumReport(float(ext), float(cas), float(extra_first + first.sum()),
                          float(second.sum()), per_point, impurity)


def finite_size_delta(dressed: DressedState, request: SpectrumRequest, L: float,
                      include_bulk: bool = False) -> SpectrumReport:
    """``dE = sum eps~_ia N_ia + (2pi/L) sum s_a v~_ia [n_ia + (sum_jb U_{jb,ia} N_jb)^2 / 2]``."""
    if request.impurities:
        raise ConfigError("finite_size_delta does not take impurities; use impurity_delta")
    N, n = request.arrays(2 * dressed.n)
    bulk = bulk_energy(dressed, L) if include_bulk else None
    return _assemble(dressed, N, n, L, bulk=bulk)


def symmetric_delta(dressed: DressedState, Ntilde, Dtilde, n, L: float, tol: float = 1e-10,
                    matrices: dict | None = None) -> SpectrumReport:
    """Symmetric-sea form

        dE = sum_i eps~_i Nt_i + (2pi/L) sum_i (v~_i/4) [(Z^-1 Nt)_i^2 + (Z^T Dt)_i^2]
             + (2pi/L) sum_ia s_a v~_ia n_ia

    with ``Nt_i = N_iR + N_{n+1-i,L}``, ``Dt_i = N_iR - N_{n+1-i,L}`` and
    ``eps~_i``, ``v~_i`` taken at ``lam_iR``.
    """
    from .dressed import symmetric_matrices

    k = dressed.n
    asym = dressed.seas.asymmetry()
    if asym > tol:
        raise SymmetryError(f"sea configuration is not symmetric (asymmetry {asym:.3e})", asym)
    Nt = np.asarray(Ntilde, dtype=float)
    Dt = np.asarray(Dtilde, dtype=float)
    if Nt.size != k or Dt.size != k:
        raise ConfigError(f"Ntilde and Dtilde need {k} entries")
    if np.any(np.mod(Nt + Dt, 2) != 0):
        raise ParityError("Ntilde_i + Dtilde_i must be even")
    n = np.asarray(n if len(n) else [0] * 2 * k, dtype=float)
    if n.size != 2 * k:
        raise ConfigError(f"n needs {2 * k} entries")
    mats = matrices or symmetric_matrices(dressed, tol)
    Z = mats["Z"]
    R = np.arange(k) * 2 + 1
    et, vt = dressed.eps_tilde_f[R], dressed.v_tilde[R]
    a = np.linalg.solve(Z, Nt)
    b = Z.T @ Dt
    first = et * Nt
    second = (TWO_PI / L) * (vt / 4.0) * (a * a + b * b)
    ph = (TWO_PI / L) * dressed.signs * dressed.v_tilde * n
    per_point = [{"i": i + 1, "Ntilde": float(Nt[i]), "Dtilde": float(Dt[i]),
                  "first": float(first[i]), "second": float(second[i])} for i in range(k)]
    return SpectrumReport(0.0, 0.0, float(first.sum()), float(second.sum() + ph.sum()), per_point)


def symmetric_to_points(Ntilde, Dtilde, n_seas: int) -> np.ndarray:
    """``N_ia`` per Fermi point from ``(Nt, Dt)``."""
    Nt = np.asarray(Ntilde, dtype=int)
    Dt = np.asarray(Dtilde, dtype=int)
    if np.any((Nt + Dt) % 2):
        raise ParityError("Ntilde_i + Dtilde_i must be even")
    N = np.zeros(2 * n_seas)
    for i in range(n_seas):
        N[2 * i + 1] = (Nt[i] + Dt[i]) // 2
        N[2 * (n_seas - 1 - i)] = (Nt[i] - Dt[i]) // 2
    return N


def points_to_symmetric(N, n_seas: int):
    N = np.asarray(N, dtype=int)
    Nt = np.array([N[2 * i + 1] + N[2 * (n_seas - 1 - i)] for i in range(n_seas)])
    Dt = np.array([N[2 * i + 1] - N[2 * (n_seas - 1 - i)] for i in range(n_seas)])
    return Nt, Dt


def _check_placement(dressed: DressedState, kind: str, lam: float):
    inside = dressed.seas.contains(lam) is not None
    on_edge = np.any(np.isclose(lam, dressed.points, rtol=0, atol=1e-12))
    if kind == "particle" and (inside or on_edge):
        raise PlacementError(f"particle impurity at {lam} must lie outside every sea")
    if kind == "hole" and not inside:
        raise PlacementError(f"hole impurity at {lam} must lie inside a sea")


def impurity_terms(dressed: DressedState, impurity) -> dict:
    """Impurity density and counting shifts of one particle or hole.

    For a particle at ``lam_p``

        n_i  = int_sea_i L(lam|lam_p) dlam = F(lam_p|lam_iL) - F(lam_p|lam_iR)
        d_i  = -F(lam_p|lam_iR) - F(lam_p|lam_iL)
        n_ia = (n_i + s_a d_i) / 2 = -s_a F(lam_p|lam_ia)

    and every shift changes sign for a hole.
    """
    kind, lam = impurity
    lam = float(lam)
    _check_placement(dressed, kind, lam)
    sgn = 1.0 if kind == "particle" else -1.0
    s = dressed.signs
    # F(lam|lam_ia) for every Fermi point
    F_at = np.array([col(lam) for col in dressed.F_cols])
    n_ia = -sgn * s * F_at
    k = dressed.n
    n_i = np.array([n_ia[2 * i] + n_ia[2 * i + 1] for i in range(k)])
    d_i = np.array([-sgn * (F_at[2 * i + 1] + F_at[2 * i]) for i in range(k)])
    rho_imp: GridFunction = dressed.resolvent(lam) * sgn
    n_quad = np.array([rho_imp.integral(i) for i in range(k)])
    pairs = np.array([(n_i[p // 2] + s[p] * d_i[p // 2]) / 2 for p in range(2 * k)])
    return {
        "type": kind, "lambda": lam, "rho_imp": rho_imp,
        "n_imp_i": n_i, "d_imp_i": d_i, "n_imp_ia": n_ia,
        "n_imp_i_quadrature": n_quad,
        "consistency": float(np.max(np.abs(pairs - n_ia))),
    }


def impurity_delta(dressed: DressedState, request: SpectrumRequest, L: float,
                   include_bulk: bool = False) -> SpectrumReport:
    """Spectrum with impurities; the counting shifts of several impurities add.

        dE = sum_imp (+-) eps(lam_imp) + sum eps~_ia (N_ia - n_ia^imp)
             + (2pi/L) sum s_a v~_ia [n_ia + (sum_jb U_{jb,ia} (N_jb - n_jb^imp))^2 / 2]
    """
    N, n = request.arrays(2 * dressed.n)
    shift = np.zeros_like(N)
    own = 0.0
    details = []
    for kind, lam in request.impurities:
        t = impurity_terms(dressed, (kind, lam))
        shift += t["n_imp_ia"]
        e = float(dressed.eps(lam))
        own += e if kind == "particle" else -e
        details.append({"type": kind, "lambda": lam, "eps": e,
                        "eps_tilde": dressed.dispersion(lam)[0],
                        "n_imp_i": t["n_imp_i"].tolist(), "d_imp_i": t["d_imp_i"].tolist(),
                        "n_imp_ia": t["n_imp_ia"].tolist()})
    bulk = bulk_energy(dressed, L) if include_bulk else None
    info = {"terms": details, "energy": own} if details else None
    return _assemble(dressed, N - shift, n, L, extra_first=own, bulk=bulk, impurity=info)


def predict(dressed: DressedState, request: SpectrumRequest, L: float,
            include_bulk: bool = False) -> SpectrumReport:
    if request.impurities:
        return impurity_delta(dressed, request, L, include_bulk)
    return finite_size_delta(dressed, request, L, include_bulk)
