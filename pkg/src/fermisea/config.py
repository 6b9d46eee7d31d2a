"""JSON run configuration.

Schema (keys other than ``model`` and ``seas`` are optional)::

    {
      "model": {"kind": "lieb_liniger", "c": 2.0} | {"kind": "xxz", "zeta": 1.047},
      "charge": {"form": "polynomial", "beta": [0, 0, 1]}
              | {"form": "xxz_energy", "zeta": 1.047}
              | {"form": "custom", "lambda": [...], "values": [...]},
      "seas": {"intervals": [[-1.0, -0.2], [0.3, 0.9]], "L": 100}
            | {"blocks": [[-40, -10], [15, 35]], "L": 100, "finite_size": true},
      "quadrature_order": 64,
      "requests": [{"N": [0, 1, 0, 0], "n": [0, 0, 0, 0],
                    "impurities": [{"type": "particle", "lambda": 2.5}]}],
      "study": {"L_values": [50, 100, 200, 400],
                "excitation": {"N": [...], "n": [...],
                               "impurities": [{"type": "particle", "I": 90.5}]}},
      "output": {"format": "json" | "csv", "path": "report.json"},
      "debug": {"fault": "mis_sign_U"}
    }

Study block edges and impurity quantum numbers are given at the reference
``seas.L`` and rescaled proportionally to every ``L`` in ``L_values``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError
from .model import BareCharge, ModelKind, ModelSpec, make_model
from .quadrature import DEFAULT_ORDER, SeaConfig
from .spectrum import SpectrumRequest


class ConfigPathError(ConfigError):
    """Configuration error located at a JSON path."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _get(d, key, path, kind=None, required=True, default=None):
    if not isinstance(d, dict):
        raise ConfigPathError("expected an object", path)
    if key not in d:
        if required:
            raise ConfigPathError(f"missing required key {key!r}", f"{path}.{key}")
        return default
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        raise ConfigPathError(f"expected {getattr(kind, '__name__', kind)}", f"{path}.{key}")
    return v


def _number(v, path) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigPathError("expected a number", path)
    return float(v)


def _pairs(v, path) -> list:
    if not isinstance(v, list) or not v:
        raise ConfigPathError("expected a non-empty list of [left, right] pairs", path)
    out = []
    for k, p in enumerate(v):
        if not isinstance(p, list) or len(p) != 2:
            raise ConfigPathError("expected a [left, right] pair", f"{path}[{k}]")
        out.append((_number(p[0], f"{path}[{k}][0]"), _number(p[1], f"{path}[{k}][1]")))
    return out


def _int_list(v, path) -> list:
    if not isinstance(v, list):
        raise ConfigPathError("expected a list of integers", path)
    out = []
    for k, x in enumerate(v):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or int(x) != x:
            raise ConfigPathError("expected an integer", f"{path}[{k}]")
        out.append(int(x))
    return out


@dataclass(frozen=True)
class StudySpec:
    L_values: tuple
    N: tuple = ()
    n: tuple = ()
    impurities: tuple = ()  # (type, I at reference L)


@dataclass(frozen=True)
class RunConfig:
    model: ModelSpec
    charge: BareCharge
    intervals: tuple | None
    blocks: tuple | None
    L: float | None
    finite_size: bool = True
    order: int = DEFAULT_ORDER
    requests: tuple = ()
    study: StudySpec | None = None
    output_format: str | None = None
    output_path: str | None = None
    fault: str | None = None
    raw: dict = field(default_factory=dict, compare=False)

    def seas(self) -> SeaConfig:
        from .dressed import seas_from_blocks

        if self.intervals is not None:
            return SeaConfig(self.intervals)
        return seas_from_blocks(self.model, self.blocks, self.L, self.order,
                                finite_size=self.finite_size, charge=self.charge)

    def resolved(self) -> dict:
        """Fully explicit configuration (defaults filled in)."""
        seas: dict = {}
        if self.intervals is not None:
            seas["intervals"] = [list(p) for p in self.intervals]
        else:
            seas["blocks"] = [list(p) for p in self.blocks]
            seas["finite_size"] = self.finite_size
        if self.L is not None:
            seas["L"] = self.L
        out = {"model": self.model.to_dict(), "charge": self.charge.to_dict(), "seas": seas,
               "quadrature_order": self.order,
               "requests": [r.to_dict() for r in self.requests]}
        if self.study is not None:
            out["study"] = {
                "L_values": list(self.study.L_values),
                "excitation": {"N": list(self.study.N), "n": list(self.study.n),
                               "impurities": [{"type": k, "I": q} for k, q in self.study.impurities]},
            }
        if self.output_format is not None or self.output_path is not None:
            out["output"] = {k: v for k, v in (("format", self.output_format),
                                               ("path", self.output_path)) if v is not None}
        if self.fault is not None:
            out["debug"] = {"fault": self.fault}
        return out


def _parse_model(d) -> ModelSpec:
    kind = _get(d, "kind", "$.model", str)
    try:
        kind = ModelKind(kind)
    except ValueError:
        raise ConfigPathError(f"unknown model kind {kind!r}", "$.model.kind") from None
    key = "c" if kind is ModelKind.LIEB_LINIGER else "zeta"
    g = _number(_get(d, key, "$.model"), f"$.model.{key}")
    try:
        return make_model(kind, g)
    except DomainError as e:
        raise ConfigPathError(str(e), f"$.model.{key}") from None


def _parse_charge(d, model: ModelSpec) -> BareCharge:
    if d is None:
        if model.kind is ModelKind.XXZ:
            return BareCharge.xxz_energy(model.zeta)
        return BareCharge.monomial(2)
    form = _get(d, "form", "$.charge", str)
    if form == "polynomial":
        beta = _get(d, "beta", "$.charge", list)
        if not beta:
            raise ConfigPathError("needs at least one coefficient", "$.charge.beta")
        return BareCharge.polynomial([_number(b, f"$.charge.beta[{k}]") for k, b in enumerate(beta)])
    if form == "xxz_energy":
        z = _number(_get(d, "zeta", "$.charge", required=False, default=model.zeta), "$.charge.zeta")
        scale = _number(_get(d, "scale", "$.charge", required=False, default=1.0), "$.charge.scale")
        try:
            ch = BareCharge.xxz_energy(z)
        except DomainError as e:
            raise ConfigPathError(str(e), "$.charge.zeta") from None
        return ch.scaled(scale) if scale != 1.0 else ch
    if form == "custom":
        lam = [_number(x, "$.charge.lambda") for x in _get(d, "lambda", "$.charge", list)]
        vals = [_number(x, "$.charge.values") for x in _get(d, "values", "$.charge", list)]
        if len(lam) != len(vals) or len(lam) < 4:
            raise ConfigPathError("lambda and values need equal length >= 4", "$.charge")
        if np.any(np.diff(lam) <= 0):
            raise ConfigPathError("lambda must be strictly increasing", "$.charge.lambda")
        return BareCharge.tabulated(lam, vals)
    raise ConfigPathError(f"unknown charge form {form!r}", "$.charge.form")


def _parse_request(d, k) -> SpectrumRequest:
    path = f"$.requests[{k}]"
    N = _int_list(_get(d, "N", path, required=False, default=[]), f"{path}.N")
    n = _int_list(_get(d, "n", path, required=False, default=[]), f"{path}.n")
    imps = []
    for j, imp in enumerate(_get(d, "impurities", path, list, required=False, default=[])):
        p = f"{path}.impurities[{j}]"
        imps.append((_get(imp, "type", p, str), _number(_get(imp, "lambda", p), f"{p}.lambda")))
    try:
        return SpectrumRequest(N, n, imps)
    except ConfigError as e:
        raise ConfigPathError(str(e), path) from None


def parse_config(data: dict) -> RunConfig:
    """Validate a configuration dict (or a report embedding one)."""
    if isinstance(data, dict) and "model" not in data and isinstance(data.get("config"), dict):
        data = data["config"]
    if not isinstance(data, dict):
        raise ConfigPathError("configuration must be a JSON object", "$")
    model = _parse_model(_get(data, "model", "$", dict))
    charge = _parse_charge(_get(data, "charge", "$", dict, required=False), model)
    seas = _get(data, "seas", "$", dict)
    has_iv, has_bl = "intervals" in seas, "blocks" in seas
    if has_iv == has_bl:
        raise ConfigPathError("give exactly one of 'intervals' or 'blocks'", "$.seas")
    L = _get(seas, "L", "$.seas", required=has_bl)
    if L is not None:
        L = _number(L, "$.seas.L")
        if not L > 0:
            raise ConfigPathError("must be positive", "$.seas.L")
    intervals = blocks = None
    try:
        if has_iv:
            intervals = tuple(_pairs(seas["intervals"], "$.seas.intervals"))
            SeaConfig(intervals)
        else:
            blocks = tuple(_pairs(seas["blocks"], "$.seas.blocks"))
            SeaConfig(blocks)
    except ConfigPathError:
        raise
    except ConfigError as e:
        raise ConfigPathError(str(e), "$.seas") from None
    finite_size = _get(seas, "finite_size", "$.seas", bool, required=False, default=True)

    order = _get(data, "quadrature_order", "$", required=False, default=DEFAULT_ORDER)
    if isinstance(order, bool) or not isinstance(order, int) or order < 4:
        raise ConfigPathError("must be an integer >= 4", "$.quadrature_order")

    reqs = tuple(_parse_request(r, k) for k, r in
                 enumerate(_get(data, "requests", "$", list, required=False, default=[])))
    n_points = 2 * len(intervals or blocks)
    for k, r in enumerate(reqs):
        if (r.N and len(r.N) != n_points) or (r.n and len(r.n) != n_points):
            raise ConfigPathError(f"N and n need {n_points} entries", f"$.requests[{k}]")
    if reqs and L is None:
        raise ConfigPathError("spectrum requests need a system length", "$.seas.L")

    study = None
    sd = _get(data, "study", "$", dict, required=False)
    if sd is not None:
        if not has_bl:
            raise ConfigPathError("a scaling study needs blocks-form seas", "$.seas")
        Ls = [_number(x, "$.study.L_values") for x in _get(sd, "L_values", "$.study", list)]
        if len(Ls) < 3 or np.any(np.diff(Ls) <= 0):
            raise ConfigPathError("need >= 3 strictly increasing values", "$.study.L_values")
        ex = _get(sd, "excitation", "$.study", dict, required=False, default={})
        N = _int_list(_get(ex, "N", "$.study.excitation", required=False, default=[]), "$.study.excitation.N")
        n = _int_list(_get(ex, "n", "$.study.excitation", required=False, default=[]), "$.study.excitation.n")
        for name, v in (("N", N), ("n", n)):
            if v and len(v) != n_points:
                raise ConfigPathError(f"needs {n_points} entries", f"$.study.excitation.{name}")
        imps = []
        for j, imp in enumerate(_get(ex, "impurities", "$.study.excitation", list, required=False, default=[])):
            p = f"$.study.excitation.impurities[{j}]"
            kind = _get(imp, "type", p, str)
            if kind not in ("particle", "hole"):
                raise ConfigPathError(f"unknown impurity type {kind!r}", f"{p}.type")
            imps.append((kind, _number(_get(imp, "I", p), f"{p}.I")))
        study = StudySpec(tuple(Ls), tuple(N), tuple(n), tuple(imps))

    out = _get(data, "output", "$", dict, required=False, default={})
    fmt = _get(out, "format", "$.output", str, required=False)
    if fmt not in (None, "json", "csv"):
        raise ConfigPathError("format must be 'json' or 'csv'", "$.output.format")
    path = _get(out, "path", "$.output", str, required=False)
    fault = _get(_get(data, "debug", "$", dict, required=False, default={}), "fault", "$.debug",
                 str, required=False)
    return RunConfig(model, charge, intervals, blocks, L, finite_size, order, reqs, study,
                     fmt, path, fault, data)
