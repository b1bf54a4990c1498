"""Command-line front end: ``prolate-sa <command> [flags]``.

Exit codes: 0 success, 1 a verify check failed, 2 invalid input,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import boundary_algebra as ba
from . import extension_solver as es
from . import legendre_backend as lb
from .errors import ConvergenceError, ValidationError

DEFAULT_TOLS = {"scan": 1e-11, "certify": 1e-9}


@dataclass(frozen=True)
class RunConfig:
    a: float = 1.0
    unitary: str = "identity"
    n_modes: int = 5
    truncation: int = 0           # 0 selects max(40, n_modes + 20)
    range_min: float | None = None
    range_max: float | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLS))
    fmt: str = "json"
    out: str | None = None
    samples: int = 201

    def __post_init__(self):
        if not self.a > 0:
            raise ValidationError("--a must be positive")
        if self.n_modes < 1:
            raise ValidationError("--modes must be >= 1")
        if self.truncation < 0:
            raise ValidationError("--truncation must be >= 0")
        if any(not v > 0 for v in self.tolerances.values()):
            raise ValidationError("tolerances must be positive")
        if self.fmt not in ("json", "csv"):
            raise ValidationError("--format must be json or csv")
        if self.samples < 2:
            raise ValidationError("--samples must be >= 2")

    @property
    def n_truncation(self) -> int:
        return self.truncation or max(40, self.n_modes + 20)

    def unitary_matrix(self) -> ba.UnitaryMatrix2:
        return ba.parse_unitary(self.unitary)


# ---------------------------------------------------------------- formatting

def _num(x):
    return float("%.15g" % x)


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_num(obj.real), _num(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _num(obj) if np.isfinite(obj) else str(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["%.15g" % v if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig):
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands

def _galerkin_upper(cfg: RunConfig, count: int) -> float:
    pairs = lb.prolate_spectrum(max(cfg.n_truncation, count + 10), cfg.a, count)
    return pairs[-1].value


def cmd_spectrum(cfg: RunConfig) -> dict:
    u = cfg.unitary_matrix()
    if u.is_identity() and cfg.range_min is None and cfg.range_max is None:
        pairs = lb.prolate_spectrum(cfg.n_truncation, cfg.a, cfg.n_modes,
                                    rtol=cfg.tolerances["certify"])
        return {"a": cfg.a, "U": u.to_pairs(), "method": "galerkin",
                "eigenvalues": [{"lambda": p.value, "multiplicity": 1,
                                 "boundary_residuals": [], "residual": p.residual} for p in pairs]}
    lo = cfg.range_min if cfg.range_min is not None else es.negative_window(cfg.a)[0]
    # eigenvalues of L_U interlace those of L_I with shift 2 (rank-2 perturbation)
    hi = cfg.range_max if cfg.range_max is not None else _galerkin_upper(cfg, cfg.n_modes + 2) * 1.02 + 1.0
    rep = es.spectrum_report(u, cfg.a, lo, hi, tol=cfg.tolerances["scan"])
    explicit = cfg.range_min is not None or cfg.range_max is not None
    if not explicit:
        kept, count = [], 0
        for e in rep["eigenvalues"]:
            if count >= cfg.n_modes:
                break
            kept.append(e)
            count += e["multiplicity"]
        rep["eigenvalues"] = kept
    rep["method"] = "shooting"
    rep["range"] = [lo, hi]
    return rep


def render_spectrum(rep: dict, cfg: RunConfig) -> str:
    if cfg.fmt == "json":
        return dumps(rep)
    rows = []
    for k, e in enumerate(rep["eigenvalues"]):
        res = e.get("residual", max(e["boundary_residuals"], default=float("nan")))
        rows.append((k, float(e["lambda"]), int(e["multiplicity"]), float(res)))
    return csv_text(["k", "lambda", "multiplicity", "residual"], rows)


def cmd_pswf(cfg: RunConfig) -> str:
    pairs = lb.prolate_spectrum(cfg.n_truncation, cfg.a, cfg.n_modes, rtol=cfg.tolerances["certify"])
    t = np.linspace(-cfg.a, cfg.a, cfg.samples)
    samples = [p.eigenfunction(t)[0] for p in pairs]
    if cfg.fmt == "csv":
        rows = [(float(ti),) + tuple(float(s[i]) for s in samples) for i, ti in enumerate(t)]
        return csv_text(["t"] + [f"chi_{p.index}" for p in pairs], rows)
    return dumps({
        "a": cfg.a, "truncation": cfg.n_truncation,
        "modes": [{"k": p.index, "lambda": p.value, "residual": p.residual,
                   "coeffs": p.eigenfunction.coeffs} for p in pairs],
        "t": t, "samples": samples,
    })


def read_samples(path: str):
    """Rows ``t,re[,im]``; a non-numeric first row is treated as a header."""
    rows = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            row = [c.strip() for c in row if c.strip()]
            if not row:
                continue
            try:
                vals = [float(c) for c in row]
            except ValueError:
                if i == 0:
                    continue
                raise ValidationError(f"non-numeric row {i + 1} in {path}")
            if len(vals) not in (2, 3):
                raise ValidationError(f"row {i + 1}: expected t,re[,im]")
            rows.append(vals + [0.0] * (3 - len(vals)))
    if len(rows) < 8:
        raise ValidationError("need at least 8 samples")
    arr = np.array(rows)
    order = np.argsort(arr[:, 0])
    return arr[order, 0], arr[order, 1] + 1j * arr[order, 2]


def fit_boundary_values(t, x, a: float, window: float = 0.2, degree: int = 3):
    """Least-squares fit of ``sum_k (A_k + B_k ln s) s**k``, ``k <= degree``, near each endpoint.

    This is the local form of every solution near a regular singular
    endpoint, so ``b = B_0`` and ``c = -A_0``.
    """
    if np.any(np.abs(t) >= a):
        raise ValidationError("samples must lie strictly inside (-a, a)")
    n_unknown = 2 * (degree + 1)
    out = {}
    for name, s in (("minus", t + a), ("plus", a - t)):
        near = s <= window * a
        if near.sum() < 2 * n_unknown:
            near = np.argsort(s)[:2 * n_unknown]
        ss, xs = s[near] / a, x[near]
        lg = np.log(ss)
        powers = ss[:, None] ** np.arange(degree + 1)
        design = np.hstack([powers, powers * lg[:, None]])
        coef, *_ = np.linalg.lstsq(design, xs, rcond=None)
        resid = float(np.linalg.norm(design @ coef - xs) / max(np.linalg.norm(xs), 1e-300))
        b = coef[degree + 1]
        out[f"b_{name}"] = complex(b)
        # s/a was fitted: A_0 + B_0 ln(s/a) = (A_0 - B_0 ln a) + B_0 ln s
        out[f"c_{name}"] = complex(-(coef[0] - b * np.log(a)))
        out[f"fit_residual_{name}"] = resid
    return out


def cmd_boundary(cfg: RunConfig, path: str) -> str:
    t, x = read_samples(path)
    fit = fit_boundary_values(t, x, cfg.a)
    if cfg.fmt == "csv":
        rows = [(k, float(np.real(v)), float(np.imag(v))) for k, v in fit.items()]
        return csv_text(["quantity", "re", "im"], rows)
    return dumps({"a": cfg.a, **fit})


def cmd_classify(cfg: RunConfig) -> str:
    u = cfg.unitary_matrix()
    s = ba.subspace_from_unitary(u)
    dom = ba.domain_subspace(u)
    rep = {
        "U": u.to_pairs(),
        "B": ba.boundary_condition_matrix(u),
        "subspace": s.basis,
        "subspace_j_self_orthogonal": ba.is_j_self_orthogonal(s),
        "domain_coordinates": dom.basis,
        "domain_quadruples": [ba.quadruple_from_coordinates(v) for v in dom.basis],
        "hermitian": bool(np.allclose(u.matrix, u.matrix.conj().T)),
        "distinguished": u.is_identity(),
    }
    if cfg.fmt == "csv":
        rows = []
        for name in ("B", "subspace", "domain_coordinates"):
            for i, row in enumerate(np.asarray(rep[name])):
                rows.append([name, i] + [f"{z.real:.15g}{z.imag:+.15g}j" for z in row])
        return csv_text(["block", "row", "col0", "col1", "col2", "col3"], rows)
    return dumps(rep)


def cmd_verify(cfg: RunConfig, suites=None) -> tuple[str, bool]:
    from .verify import run_all
    results = run_all(cfg.a, suites)
    ok = all(r.passed for r in results)
    if cfg.fmt == "csv":
        text = csv_text(["module", "check", "value", "tol", "passed"],
                        [(r.module, r.ident, r.value, r.tol, r.passed) for r in results])
    else:
        text = dumps({"a": cfg.a, "passed": ok, "checks": [r.as_dict() for r in results],
                      "failed": [r.ident for r in results if not r.passed]})
    return text, ok


# ---------------------------------------------------------------- parsing

FLAG_KEYS = {"a": float, "unitary": str, "modes": int, "truncation": int,
             "range-min": float, "range-max": float, "tol": float, "format": str,
             "out": str, "samples": int}


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys mirror the long flags."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.lstrip("-").replace("_", "-")
        if key not in FLAG_KEYS:
            raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = FLAG_KEYS[key](value)
        except ValueError as exc:
            raise ValidationError(f"{path}:{lineno}: bad value for {key}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, help="half width of the interval (default 1)")
    common.add_argument("--unitary", help="identity | neg-identity | swap | 8 comma-separated reals")
    common.add_argument("--modes", type=int, help="number of modes (default 5)")
    common.add_argument("--truncation", type=int, help="Galerkin truncation N")
    common.add_argument("--range-min", type=float, dest="range_min")
    common.add_argument("--range-max", type=float, dest="range_max")
    common.add_argument("--tol", type=float, help="root tolerance for the shooting scan")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--out", help="write output to this file")
    common.add_argument("--samples", type=int, help="sample count for eigenfunction tables")
    common.add_argument("--config", help="key=value file mirroring the flags")
    p = argparse.ArgumentParser(prog="prolate-sa",
                                description="Self-adjoint extensions of the prolate operator.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="eigenvalues of L_U")
    sub.add_parser("pswf", parents=[common], help="prolate eigenpairs and sampled eigenfunctions")
    b = sub.add_parser("boundary", parents=[common], help="boundary values of sampled data")
    b.add_argument("input", help="CSV file with columns t,re[,im]")
    sub.add_parser("classify", parents=[common], help="boundary conditions and subspace of U")
    v = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    v.add_argument("--suite", action="append", help="restrict to a suite (repeatable)")
    return p


def config_from_args(args) -> RunConfig:
    merged = read_config(args.config) if args.config else {}
    for key in FLAG_KEYS:
        val = getattr(args, key.replace("-", "_"))
        if val is not None:
            merged[key] = val
    tols = dict(DEFAULT_TOLS)
    if "tol" in merged:
        tols["scan"] = merged["tol"]
    return RunConfig(
        a=merged.get("a", 1.0), unitary=merged.get("unitary", "identity"),
        n_modes=merged.get("modes", 5), truncation=merged.get("truncation", 0),
        range_min=merged.get("range-min"), range_max=merged.get("range-max"),
        tolerances=tols, fmt=merged.get("format", "json"), out=merged.get("out"),
        samples=merged.get("samples", 201))


def _report_error(exc, fmt, code):
    if fmt == "json":
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc),
                                     "exit_code": code}) + "\n")
    else:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
    return code


def dispatch(argv) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format or "json"
    try:
        cfg = config_from_args(args)
        fmt = cfg.fmt
        if args.command == "spectrum":
            _emit(render_spectrum(cmd_spectrum(cfg), cfg), cfg)
        elif args.command == "pswf":
            _emit(cmd_pswf(cfg), cfg)
        elif args.command == "boundary":
            _emit(cmd_boundary(cfg, args.input), cfg)
        elif args.command == "classify":
            _emit(cmd_classify(cfg), cfg)
        elif args.command == "verify":
            text, ok = cmd_verify(cfg, args.suite)
            _emit(text, cfg)
            return 0 if ok else 1
    except ValidationError as exc:
        return _report_error(exc, fmt, 2)
    except ConvergenceError as exc:
        return _report_error(exc, fmt, 3)
    except OSError as exc:
        return _report_error(exc, fmt, 2)
    return 0


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
