"""Command-line front end: ``fermisea {compute,verify,scaling} config.json``.

Exit codes: 0 success, 1 invariant failure, 2 configuration error,
3 solver failure.  Errors are also written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import ConfigPathError, RunConfig, parse_config
from .dressed import DressedState, counts, seas_from_blocks, symmetric_matrices
from .errors import FermiSeaError
from .finite_bethe import ExcitationSpec, block_state, excited_state, image_rapidity, observables
from .invariants import all_passed, run_invariants
from .spectrum import SpectrumRequest, bulk_energy, predict

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3


class InvariantFailure(Exception):
    def __init__(self, failed):
        super().__init__("invariant checks failed: " + ", ".join(failed))
        self.failed = failed


# ---------------------------------------------------------------------------
# deterministic JSON


def _fmt(x: float, exact: bool) -> str:
    if not math.isfinite(x):
        return json.dumps(str(x))
    return repr(x) if exact else "%.12e" % x


def encode(obj, exact: bool = False, indent: int = 0) -> str:
    """JSON text with floats as ``%.12e`` (or round-trip repr when ``exact``)."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for k, v in obj.items():
            items.append(f"{inner}{json.dumps(str(k))}: "
                         f"{encode(v, exact or k == 'config', indent + 1)}")
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj.tolist() if isinstance(obj, np.ndarray) else obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool)
               for v in seq):
            return "[" + ", ".join(encode(v, exact) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + encode(v, exact, indent + 1) for v in seq) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj), exact)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


# ---------------------------------------------------------------------------
# pipelines


def _state(cfg: RunConfig) -> DressedState:
    return DressedState(cfg.model, cfg.charge, cfg.seas(), cfg.order)


def run_compute(cfg: RunConfig) -> dict:
    st = _state(cfg)
    gate = run_invariants(st, fault=cfg.fault)
    if not all_passed(gate):
        raise InvariantFailure([r.name for r in gate if not r.passed])
    report = {"config": cfg.resolved(), "seas": st.seas.to_dict(),
              "fermi_points": [fp.to_dict() for fp in st.fermi],
              "U": st.U, "Uinv": st.Uinv}
    if st.seas.asymmetry() <= 1e-10:
        mats = symmetric_matrices(st)
        report["symmetric"] = {"Z": mats["Z"], "Y": mats["Y"], "xi": mats["xi"]}
    if cfg.L is not None:
        report["counts"] = counts(st, cfg.L)
        report["bulk"] = bulk_energy(st, cfg.L)
        report["requests"] = [
            {"request": r.to_dict(), "report": predict(st, r, cfg.L).to_dict()} for r in cfg.requests]
    report["invariants"] = {"passed": True, "count": len(gate)}
    return report


def run_verify(cfg: RunConfig) -> tuple[list, bool]:
    st = _state(cfg)
    results = run_invariants(st, fault=cfg.fault)
    return results, all_passed(results)


def _rescale(x: float, L: float, L0: float) -> float:
    """Scale a quantum number keeping its integer / half-odd lattice."""
    frac = x - math.floor(x)
    return float(round((x - frac) * L / L0) + frac)


def scaling_row(cfg: RunConfig, L: float) -> dict:
    L0 = cfg.L
    blocks = [(_rescale(a, L, L0), _rescale(b, L, L0)) for a, b in cfg.blocks]
    sd = cfg.study
    seas = seas_from_blocks(cfg.model, blocks, L, cfg.order, finite_size=cfg.finite_size,
                            charge=cfg.charge)
    st = DressedState(cfg.model, cfg.charge, seas, cfg.order)
    bulk = bulk_energy(st, L)
    base = block_state(cfg.model, blocks, L)
    delta = 0.0
    state = base
    if any(sd.N) or any(sd.n) or sd.impurities:
        imps_I = [(k, _rescale(q, L, L0)) for k, q in sd.impurities]
        spec = ExcitationSpec(blocks, sd.N, sd.n, imps_I)
        state = excited_state(cfg.model, base, spec)
        imps = []
        for kind, q in imps_I:
            if kind == "particle":
                lam = float(state.lambdas[np.flatnonzero(state.I == q)[0]])
            else:
                lam = image_rapidity(cfg.model, state, q)
            imps.append((kind, lam))
        delta = predict(st, SpectrumRequest(sd.N, sd.n, imps), L).delta
    E_fin = observables(cfg.model, state, cfg.charge)["E"]
    E_pred = bulk["extensive"] + bulk["casimir"] + delta
    res = E_fin - E_pred
    return {"L": L, "E_finite": E_fin, "E_pred": E_pred, "residual": res,
            "residual_L": res * L, "residual_L2": res * L * L, "status": "ok"}


def fitted_slope(rows) -> float:
    """Decay exponent ``-d log|residual| / d log L`` over completed rows."""
    pts = [(r["L"], abs(r["residual"])) for r in rows if r["status"] == "ok" and r["residual"] != 0]
    if len(pts) < 2:
        return float("nan")
    x, y = np.log([p[0] for p in pts]), np.log([p[1] for p in pts])
    return float(-np.polyfit(x, y, 1)[0])


def run_scaling(cfg: RunConfig, jobs: int = 1) -> tuple[list, float]:
    if cfg.study is None:
        raise ConfigPathError("scaling needs a 'study' section", "$.study")

    def task(L):
        try:
            return scaling_row(cfg, L)
        except FermiSeaError as e:
            nan = float("nan")
            return {"L": L, "E_finite": nan, "E_pred": nan, "residual": nan, "residual_L": nan,
                    "residual_L2": nan, "status": f"error: {type(e).__name__}"}

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as ex:
        rows = list(ex.map(task, cfg.study.L_values))
    return rows, fitted_slope(rows)


COLUMNS = ("L", "E_finite", "E_pred", "residual", "residual_L", "residual_L2", "status")


def scaling_csv(rows, slope) -> str:
    buf = io.StringIO()
    buf.write(",".join(COLUMNS) + "\n")
    for r in rows:
        vals = ["%.12e" % r[c] for c in COLUMNS[:-1]] + [r["status"]]
        buf.write(",".join(vals) + "\n")
    buf.write("# fitted_slope,%.12e\n" % slope)
    buf.write("# incomplete_rows,%d\n" % sum(r["status"] != "ok" for r in rows))
    return buf.getvalue()


def compute_csv(report: dict) -> str:
    keys = ("i", "a", "s", "lambda", "k", "rho", "eps", "eps_prime", "eps_tilde",
            "eps_tilde_prime", "v", "v_tilde")
    buf = io.StringIO()
    buf.write(",".join(keys) + "\n")
    for fp in report["fermi_points"]:
        row = [str(fp["i"]), fp["a"]] + ["%.12e" % fp[k] for k in keys[2:]]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def verify_csv(results) -> str:
    buf = io.StringIO()
    buf.write("name,residual,tol,passed\n")
    for r in results:
        buf.write(f"{r.name},{'%.12e' % r.residual},{'%.12e' % r.tol},{'pass' if r.passed else 'FAIL'}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# entry point


def _error(kind: str, message: str, code: int, path: str | None = None) -> int:
    payload = {"error": kind, "message": message, "exit_code": code}
    if path is not None:
        payload["path"] = path
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def _emit(text: str, cfg: RunConfig, override: str | None):
    path = override or cfg.output_path
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fermisea", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (("compute", "dressed quantities and spectrum predictions"),
                       ("verify", "run the invariant suite"),
                       ("scaling", "finite-N versus prediction over L_values")):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("config", help="JSON configuration (or an earlier report)")
        sp.add_argument("-o", "--output", help="output path (default: config output.path or stdout)")
        if name == "scaling":
            sp.add_argument("-j", "--jobs", type=int, default=1, help="concurrent rows")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        return _error("ConfigError", str(e), EXIT_CONFIG, "$")
    except json.JSONDecodeError as e:
        return _error("ConfigError", f"invalid JSON: {e}", EXIT_CONFIG, "$")
    try:
        cfg = parse_config(data)
        if args.command == "compute":
            report = run_compute(cfg)
            text = compute_csv(report) if cfg.output_format == "csv" else encode(report) + "\n"
            _emit(text, cfg, args.output)
            return EXIT_OK
        if args.command == "verify":
            results, ok = run_verify(cfg)
            if cfg.output_format == "csv":
                text = verify_csv(results)
            else:
                text = encode({"config": cfg.resolved(), "passed": ok,
                               "invariants": [r.to_dict() for r in results]}) + "\n"
            _emit(text, cfg, args.output)
            return EXIT_OK if ok else EXIT_INVARIANT
        rows, slope = run_scaling(cfg, args.jobs)
        if cfg.output_format == "json":
            text = encode({"config": cfg.resolved(), "rows": rows, "fitted_slope": slope}) + "\n"
        else:
            text = scaling_csv(rows, slope)
        _emit(text, cfg, args.output)
        return EXIT_OK
    except ConfigPathError as e:
        return _error("ConfigError", str(e), EXIT_CONFIG, e.path)
    except InvariantFailure as e:
        return _error("InvariantFailure", str(e), EXIT_INVARIANT)
    except ValueError as e:
        return _error(type(e).__name__, str(e), EXIT_CONFIG)
    except ArithmeticError as e:
        return _error(type(e).__name__, str(e), EXIT_SOLVER)


if __name__ == "__main__":
    sys.exit(main())
