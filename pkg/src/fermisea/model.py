"""Integrable-model kernels and bare charge functions.

Two models ship: the repulsive Lieb-Liniger gas and the XXZ chain in its
gapless regime with real rapidities.  Every kernel function is vectorised
over numpy arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.interpolate import CubicSpline

from .errors import DomainError, RangeError

# below this |cos zeta| the XXZ chain is treated as the free-fermion point
_XX_POINT_TOL = 1e-15


class ModelKind(str, enum.Enum):
    LIEB_LINIGER = "lieb_liniger"
    XXZ = "xxz"


@dataclass(frozen=True)
class ModelSpec:
    """Kernel triple of a Bethe-ansatz model.

    ``coupling`` is ``c`` for Lieb-Liniger and the anisotropy angle ``zeta``
    (``Delta = cos zeta``) for XXZ.
    """

    kind: ModelKind
    coupling: float

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        g = float(self.coupling)
        if not np.isfinite(g):
            raise DomainError(f"coupling must be finite, got {self.coupling!r}")
        if self.kind is ModelKind.LIEB_LINIGER and not g > 0:
            raise DomainError(f"Lieb-Liniger requires c > 0, got c={g}")
        if self.kind is ModelKind.XXZ and not 0 < g < np.pi:
            raise DomainError(f"XXZ requires zeta in (0, pi), got zeta={g}")
        object.__setattr__(self, "coupling", g)

    # -- parameters -------------------------------------------------------
    @property
    def c(self) -> float:
        return self.coupling

    @property
    def zeta(self) -> float:
        return self.coupling

    @property
    def delta(self) -> float:
        """Anisotropy ``cos zeta`` (XXZ only)."""
        d = np.cos(self.zeta)
        return 0.0 if abs(d) < _XX_POINT_TOL else float(d)

    def _sin_cos(self, z):
        s, c = np.sin(z), np.cos(z)
        if abs(c) < _XX_POINT_TOL:
            c = 0.0
        return s, c

    # -- kernels ----------------------------------------------------------
    def p0(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.kind is ModelKind.LIEB_LINIGER:
            return lam.copy()
        s, c = self._sin_cos(self.zeta / 2)
        return 2.0 * np.arctan(np.tanh(lam) * c / s)

    def p0_prime(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.kind is ModelKind.LIEB_LINIGER:
            return np.ones_like(lam)
        z = self.zeta
        return 2.0 * np.sin(z) / (np.cosh(2 * lam) - np.cos(z))

    def p0_inverse(self, p):
        """Inverse of the bare momentum; used for free-fermion initial guesses."""
        p = np.asarray(p, dtype=float)
        if self.kind is ModelKind.LIEB_LINIGER:
            return p.copy()
        bound = np.pi - self.zeta
        if np.any(np.abs(p) >= bound):
            raise DomainError(f"bare momentum outside (-{bound:.6g}, {bound:.6g})")
        return np.arctanh(np.tan(self.zeta / 2) * np.tan(p / 2))

    def theta(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.kind is ModelKind.LIEB_LINIGER:
            return 2.0 * np.arctan(lam / self.c)
        s, c = self._sin_cos(self.zeta)
        return 2.0 * np.arctan(np.tanh(lam) * c / s)

    def K(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.kind is ModelKind.LIEB_LINIGER:
            c = self.c
            return 2.0 * c / (c * c + lam * lam)
        s2 = self._sin2z()
        return 2.0 * s2 / (np.cosh(2 * lam) - np.cos(2 * self.zeta))

    def K_prime(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.kind is ModelKind.LIEB_LINIGER:
            c = self.c
            return -4.0 * c * lam / (c * c + lam * lam) ** 2
        s2 = self._sin2z()
        den = np.cosh(2 * lam) - np.cos(2 * self.zeta)
        return -4.0 * s2 * np.sinh(2 * lam) / den**2

    def _sin2z(self):
        s, c = self._sin_cos(self.zeta)
        return 2.0 * s * c

    def to_dict(self) -> dict:
        key = "c" if self.kind is ModelKind.LIEB_LINIGER else "zeta"
        return {"kind": self.kind.value, key: self.coupling}


def make_model(kind, coupling: float) -> ModelSpec:
    """Build a :class:`ModelSpec`, raising :class:`DomainError` on bad coupling."""
    try:
        kind = ModelKind(kind)
    except ValueError:
        raise DomainError(f"unknown model kind {kind!r}") from None
    return ModelSpec(kind, coupling)


def eval_kernels(model: ModelSpec, lam: float) -> dict:
    return {
        "p0": float(model.p0(lam)),
        "p0_prime": float(model.p0_prime(lam)),
        "theta": float(model.theta(lam)),
        "K": float(model.K(lam)),
        "K_prime": float(model.K_prime(lam)),
    }


class ChargeForm(str, enum.Enum):
    POLYNOMIAL = "polynomial"
    XXZ_ENERGY = "xxz_energy"
    CUSTOM = "custom"


@dataclass(frozen=True)
class BareCharge:
    """Bare energy function ``eps0`` and its derivative.

    Build instances with :meth:`polynomial`, :meth:`xxz_energy` or
    :meth:`tabulated` rather than calling the constructor directly.
    """

    form: ChargeForm
    params: tuple = ()
    description: str = ""
    _spline: CubicSpline | None = field(default=None, repr=False, compare=False)

    @classmethod
    def polynomial(cls, beta: Sequence[float], description: str = "") -> "BareCharge":
        beta = tuple(float(b) for b in beta)
        if not beta:
            raise ValueError("polynomial charge needs at least one coefficient")
        return cls(ChargeForm.POLYNOMIAL, beta, description or f"poly{list(beta)}")

    @classmethod
    def monomial(cls, n: int) -> "BareCharge":
        """Eigenvalue function ``lambda**n`` of the n-th conserved charge."""
        return cls.polynomial([0.0] * n + [1.0], description=f"q{n}")

    @classmethod
    def xxz_energy(cls, zeta: float) -> "BareCharge":
        if not 0 < zeta < np.pi:
            raise DomainError(f"XXZ requires zeta in (0, pi), got {zeta}")
        return cls(ChargeForm.XXZ_ENERGY, (float(zeta), 1.0), "xxz_energy")

    @classmethod
    def tabulated(cls, lam, values, description: str = "custom") -> "BareCharge":
        lam = np.asarray(lam, dtype=float)
        values = np.asarray(values, dtype=float)
        spline = CubicSpline(lam, values)
        return cls(ChargeForm.CUSTOM, (tuple(lam), tuple(values)), description, spline)

    @property
    def beta(self) -> tuple:
        if self.form is not ChargeForm.POLYNOMIAL:
            raise AttributeError("beta is defined for polynomial charges only")
        return self.params

    def scaled(self, alpha: float) -> "BareCharge":
        """The charge ``alpha * eps0``."""
        if self.form is ChargeForm.POLYNOMIAL:
            return BareCharge.polynomial([alpha * b for b in self.params])
        if self.form is ChargeForm.XXZ_ENERGY:
            z, s = self.params
            return BareCharge(ChargeForm.XXZ_ENERGY, (z, s * alpha), self.description)
        lam, vals = self.params
        return BareCharge.tabulated(lam, alpha * np.asarray(vals), self.description)

    def eps0(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.form is ChargeForm.POLYNOMIAL:
            return P.polyval(lam, self.params)
        if self.form is ChargeForm.XXZ_ENERGY:
            z, s = self.params
            return -2.0 * s * np.sin(z) ** 2 / (np.cosh(2 * lam) - np.cos(z))
        self._check_range(lam)
        return self._spline(lam)

    def eps0_prime(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.form is ChargeForm.POLYNOMIAL:
            return P.polyval(lam, P.polyder(self.params)) if len(self.params) > 1 \
                else np.zeros_like(lam)
        if self.form is ChargeForm.XXZ_ENERGY:
            z, s = self.params
            den = np.cosh(2 * lam) - np.cos(z)
            return 4.0 * s * np.sin(z) ** 2 * np.sinh(2 * lam) / den**2
        self._check_range(lam)
        return self._spline(lam, 1)

    def _check_range(self, lam):
        lo, hi = self.params[0][0], self.params[0][-1]
        if np.any(lam < lo) or np.any(lam > hi):
            raise RangeError(f"custom charge tabulated on [{lo}, {hi}] only")

    def is_even(self, probe=np.linspace(0.05, 3.0, 7), tol=1e-12) -> bool:
        try:
            a, b = self.eps0(probe), self.eps0(-probe)
        except RangeError:
            return False
        return bool(np.all(np.abs(a - b) <= tol * (1 + np.abs(a))))

    def to_dict(self) -> dict:
        if self.form is ChargeForm.POLYNOMIAL:
            return {"form": "polynomial", "beta": list(self.params)}
        if self.form is ChargeForm.XXZ_ENERGY:
            z, s = self.params
            out = {"form": "xxz_energy", "zeta": z}
            if s != 1.0:
                out["scale"] = s
            return out
        lam, vals = self.params
        return {"form": "custom", "lambda": list(lam), "values": list(vals)}


def eval_bare(charge: BareCharge, lam: float) -> dict:
    return {"eps0": float(charge.eps0(lam)), "eps0_prime": float(charge.eps0_prime(lam))}
