"""Command-line front end: orbits, verification suites, classification, confinement probes.

Exit codes: 0 pass, 1 a check failed, 2 a stage hit a singularity, 3 the precision budget ran out.
"""
import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .charts import chart_matrix, normalization_error, phi_affine
from .deformation import L_chart, L_homogeneous, factor_maps, fiber_residual
from .errors import PencilError, PrecisionExhausted, ProbeFailed, StageError
from .families import base_points, base_points_2d, expected_char_poly, make_config
from .painleve_engine import (
    DEFAULT_ORIGIN,
    OrbitState,
    OrbitTrace,
    confinement_probe_3d,
    conjugacy_check,
    initial_state,
    net_audit,
    orbit,
    verify_recurrence,
)
from .pencil_core import char_poly, classify_pencil, projective_distance
from .qrt import FiberContext, i1_fiber, i2_fiber
from .uniformization import lambda_of, shift, sqrt_delta_of

EXIT_PASS, EXIT_FAIL, EXIT_STAGE, EXIT_PRECISION = 0, 1, 2, 3

DEFAULT_TOLS = {
    "recurrence": 1e-8,
    "normalization": 1e-10,
    "involutivity": 1e-9,
    "fiber": 1e-8,
    "l_fixing": 1e-10,
    "factorization": 1e-9,
    "conjugacy": 1e-9,
}
PROBE_EPS = 1e-4


# --- config files ---------------------------------------------------------------------


def parse_number(text):
    """A real literal becomes a Fraction (exact constraint checks); "a+bi" becomes complex."""
    text = text.strip().replace(" ", "")
    try:
        return Fraction(text)
    except ValueError:
        pass
    return complex(text.replace("i", "j"))


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class ConfigFile:
    cfg: object
    origin: complex = DEFAULT_ORIGIN
    x0: complex = None
    y0: complex = None


def parse_config(text):
    """Flat key=value lines; '#' starts a comment. Parameters are comma-separated."""
    raw = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        raw[key.lower()] = value
    if "family" not in raw or "step" not in raw:
        raise ValueError("config needs 'family' and 'step'")
    keys = [k for k in ("params", "a", "c", "z") if k in raw]
    if len(keys) != 1:
        raise ValueError("config needs exactly one of params, a, c, z")
    params = [parse_number(v) for v in raw[keys[0]].split(",")]
    kappa = parse_number(raw["kappa"]) if "kappa" in raw else None
    cfg = make_config(
        raw["family"],
        params,
        complex(parse_number(raw["step"])),
        kappa=kappa,
        symmetric=_parse_bool(raw.get("symmetric", "false")),
    )
    out = ConfigFile(cfg)
    if "origin" in raw:
        out.origin = complex(parse_number(raw["origin"]))
    for key in ("x0", "y0"):
        if key in raw:
            setattr(out, key, complex(parse_number(raw[key])))
    return out


def load_config(path):
    return parse_config(Path(path).read_text())


def config_to_dict(cfg):
    return {
        "family": cfg.tag.value,
        "params": list(cfg.params),
        "step": cfg.step,
        "kappa": cfg.kappa,
        "symmetric": cfg.symmetric,
    }


def config_from_dict(d):
    kappa = d.get("kappa")
    return make_config(
        d["family"],
        [_unpack(v) for v in d["params"]],
        _unpack(d["step"]),
        kappa=None if kappa is None else _unpack(kappa),
        symmetric=d.get("symmetric", False),
    )


# --- serialization --------------------------------------------------------------------


def _pack(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating, Fraction)):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, dict):
        return {k: _pack(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_pack(x) for x in v]
    return v


def _unpack(v):
    return complex(v[0], v[1]) if isinstance(v, list) else v


def complex_to_csv(z):
    z = complex(z)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


def _csv_cell(v):
    if isinstance(v, (complex, np.complexfloating)):
        return complex_to_csv(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_cell(x) for x in v)
    return v


def render(payload, fmt):
    if fmt == "json":
        return json.dumps(_pack(payload), indent=2) + "\n"
    rows = payload["rows"]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["seed"], lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return buf.getvalue()


@dataclass
class RunManifest:
    config: str
    command: str
    seed: int = 0
    fmt: str = "json"
    out: str = None
    tols: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.fmt not in ("json", "csv"):
            raise ValueError("format must be json or csv")
        for name, value in self.tols.items():
            if not value > 0:
                raise ValueError(f"tolerance {name} must be positive")

    def tol(self, name):
        return self.tols.get(name, self.tols.get("default", DEFAULT_TOLS[name]))


def _parse_tols(items, main):
    tols = {}
    for item in items or ():
        if "=" in item:
            name, value = item.split("=", 1)
            if name not in DEFAULT_TOLS:
                raise ValueError(f"unknown tolerance {name!r}")
            tols[name] = float(value)
        else:
            tols[main] = float(item)
    return tols


def _emit(manifest, payload):
    payload = {"seed": manifest.seed, "command": manifest.command, **payload}
    for row in payload.get("rows", []):
        row.setdefault("seed", manifest.seed)
    text = render(payload, manifest.fmt)
    if manifest.out:
        Path(manifest.out).write_text(text)
    else:
        sys.stdout.write(text)


# --- commands -------------------------------------------------------------------------


def _start(cf, rng):
    x0 = cf.x0 if cf.x0 is not None else complex(*rng.normal(size=2))
    y0 = cf.y0 if cf.y0 is not None else complex(*rng.normal(size=2))
    return initial_state(cf.cfg, x0, y0, cf.origin)


def _state_record(s):
    return {"n": str(s.n), "x": s.x, "y": s.y, "position": s.p.value, "offset": s.p.offset}


def cmd_orbit(manifest, n_steps, autonomous_mismatch=False):
    cf = load_config(manifest.config)
    cfg = cf.cfg
    start = _start(cf, np.random.default_rng(manifest.seed))
    run_cfg = cfg.autonomous() if autonomous_mismatch else cfg
    start = OrbitState(start.n, start.x, start.y, run_cfg.param(cf.origin, start.p.offset))
    trace = orbit(run_cfg, start, n_steps)
    residuals = verify_recurrence(cfg, trace) if n_steps > 0 else []
    worst = max((max(r) for r in residuals), default=0.0)
    tol = manifest.tol("recurrence")
    rows = []
    for k, s in enumerate(trace.states):
        rec = _state_record(s)
        r = residuals[k - 1] if k > 0 else (None, None)
        rec.update(residual_1=r[0], residual_2=r[1])
        rows.append(rec)
    payload = {
        "config": config_to_dict(cfg),
        "origin": cf.origin,
        "autonomous_mismatch": autonomous_mismatch,
        "states": [_state_record(s) for s in trace.states],
        "residuals": [list(r) for r in residuals],
        "max_residual": worst,
        "predicted_error": trace.predicted_error,
        "tol": tol,
        "passed": worst < tol,
        "rows": rows,
    }
    _emit(manifest, payload)
    return EXIT_PASS if worst < tol else EXIT_FAIL


def trace_from_orbit_file(path):
    """(cfg, trace) from an orbit JSON written by ``orbit``."""
    d = json.loads(Path(path).read_text())
    cfg = config_from_dict(d["config"])
    run_cfg = cfg.autonomous() if d.get("autonomous_mismatch") else cfg
    origin = _unpack(d["origin"])
    states = [
        OrbitState(Fraction(s["n"]), _unpack(s["x"]), _unpack(s["y"]), run_cfg.param(origin, s["offset"]))
        for s in d["states"]
    ]
    return cfg, OrbitTrace(states)


def _random_point(rng):
    return complex(*rng.normal(size=2))


def invariant_suite(cfg, origin, rng, tol, n_points=10):
    """List of (invariant, worst value, tolerance, passed) over random points and positions."""
    results = []

    def add(name, value, limit, passed=None):
        results.append((name, float(value), limit, bool(value < limit) if passed is None else passed))

    p = cfg.param(origin)
    positions = [shift(p, k) for k in range(4)]
    add("normalization", max(normalization_error(chart_matrix(cfg.tag, q, cfg.kappa)) for q in positions),
        tol("normalization"))

    worst = 0.0
    for q in positions:
        ctx = FiberContext(cfg, q)
        for _ in range(n_points):
            x, y = _random_point(rng), _random_point(rng)
            y1 = i1_fiber(ctx, x, y)
            x2 = i2_fiber(ctx, x, y)
            worst = max(worst, abs(i1_fiber(ctx, x, y1) - y) / (1 + abs(y)),
                        abs(i2_fiber(ctx, x2, y) - x) / (1 + abs(x)))
    add("involutivity", worst, tol("involutivity"))

    fib, fix = 0.0, 0.0
    chart = chart_matrix(cfg.tag, p, cfg.kappa)
    for _ in range(n_points):
        X = L_homogeneous(cfg, p, phi_affine(chart, _random_point(rng), _random_point(rng)))
        fib = max(fib, fiber_residual(cfg, shift(p, 2), X))
    for S in base_points(cfg):
        fix = max(fix, projective_distance(L_homogeneous(cfg, p, S, check=False), S))
    add("l_fiber", fib, tol("fiber"))
    add("l_fixing", fix, tol("l_fixing"))

    worst = 0.0
    for _ in range(n_points):
        x, y = _random_point(rng), _random_point(rng)
        xl, yl, _ = L_chart(cfg, p, x, y)
        for seq in (("L1", "R2"), ("L2", "R1")):
            xf, yf, _ = factor_maps(cfg, p, x, y, seq)
            worst = max(worst, abs(xf - xl) / (1 + abs(xl)), abs(yf - yl) / (1 + abs(yl)))
    add("factorization", worst, tol("factorization"))

    worst = 0.0
    for _ in range(n_points):
        s = initial_state(cfg, _random_point(rng), _random_point(rng), origin)
        worst = max(worst, conjugacy_check(cfg, s))
    add("conjugacy", worst, tol("conjugacy"))

    dims = net_audit(cfg, origin)
    results.append(("net_audit", float(dims[1]), 2.0, dims[0] >= 3 and dims[1] == 2))

    for i in range(1, 9):
        try:
            rep = confinement_probe_3d(cfg, i, PROBE_EPS, origin=origin)
        except ProbeFailed as exc:
            rep = exc.report
        results.append((f"confinement_{i}", rep.collapse_ratio, PROBE_EPS, rep.passed))
    return results


def cmd_verify(manifest, orbit_file=None):
    rows = []
    if orbit_file:
        cfg, trace = trace_from_orbit_file(orbit_file)
        worst = max(max(r) for r in verify_recurrence(cfg, trace))
        tol = manifest.tol("recurrence")
        rows.append({"invariant": "recurrence", "value": worst, "tol": tol, "passed": worst < tol})
    else:
        cf = load_config(manifest.config)
        cfg = cf.cfg
        rng = np.random.default_rng(manifest.seed)
        for name, value, tol, passed in invariant_suite(cfg, cf.origin, rng, manifest.tol):
            rows.append({"invariant": name, "value": value, "tol": tol, "passed": passed})
    passed = all(r["passed"] for r in rows)
    _emit(manifest, {"family": cfg.tag.value, "passed": passed, "rows": rows})
    if not passed:
        first = next(r for r in rows if not r["passed"])
        print(f"verify failed: {first['invariant']} = {first['value']:.3e} (limit {first['tol']:.1e})",
              file=sys.stderr)
    return EXIT_PASS if passed else EXIT_FAIL


def _poly_text(poly):
    terms = []
    for k, c in enumerate(poly.coef):
        c = complex(c)
        if abs(c) < 1e-14:
            continue
        c = c.real if abs(c.imag) < 1e-14 else c
        coef = f"{c:g}" if isinstance(c, float) else f"({c:g})"
        terms.append(coef if k == 0 else f"{coef}*lam" if k == 1 else f"{coef}*lam^{k}")
    return " + ".join(terms).replace("+ -", "- ") or "0"


def cmd_classify(manifest, tol=1e-9):
    cfg = load_config(manifest.config).cfg
    pencil = cfg.pencil
    poly = char_poly(pencil)
    ptype = classify_pencil(pencil, tol=tol)
    expected = cfg.tag.pencil_type
    rows = [
        {"family": cfg.tag.value, "type": ptype.tag, "root": r, "multiplicity": m, "corank": c}
        for r, m, c in ptype.root_data
    ]
    summary = f"type {ptype.tag}, Delta = {_poly_text(poly)}"
    payload = {
        "family": cfg.tag.value,
        "delta_coefficients": [complex(c) for c in poly.coef],
        "expected_delta_coefficients": [complex(c) for c in expected_char_poly(cfg.tag, cfg.kappa).coef],
        "type": ptype.tag,
        "segre": ptype.segre,
        "expected_type": expected,
        "summary": summary,
        "rows": rows,
    }
    _emit(manifest, payload)
    print(summary, file=sys.stderr)
    return EXIT_PASS if ptype.tag == expected else EXIT_FAIL


def cmd_confine(manifest, indices=None, eps=PROBE_EPS):
    cf = load_config(manifest.config)
    rows = []
    for i in indices or range(1, 9):
        try:
            rep = confinement_probe_3d(cf.cfg, i, eps, origin=cf.origin)
        except ProbeFailed as exc:
            rep = exc.report
        rows.append({
            "index": i,
            "eps": eps,
            "collapse_ratio": rep.collapse_ratio,
            "reexpansion_ratio": rep.reexpansion_ratio,
            "collapse": list(rep.collapse),
            "mutual": list(rep.mutual),
            "reexpansion": list(rep.reexpansion),
            "spread": list(rep.spread),
            "drift": rep.drift,
            "passed": rep.passed,
        })
    passed = all(r["passed"] for r in rows)
    _emit(manifest, {"family": cf.cfg.tag.value, "passed": passed, "rows": rows})
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_pencil_info(manifest):
    cf = load_config(manifest.config)
    cfg = cf.cfg
    p = cfg.param(cf.origin)
    rows = []
    for i, ((x, y), S) in enumerate(zip(base_points_2d(cfg), base_points(cfg)), 1):
        rows.append({"index": i, "x": x, "y": y, "X": list(S.coords)})
    payload = {
        "config": config_to_dict(cfg),
        "q0": cfg.pencil.m0.m,
        "q_inf": cfg.pencil.minf.m,
        "delta_coefficients": [complex(c) for c in char_poly(cfg.pencil).coef],
        "expected_type": cfg.tag.pencil_type,
        "origin": cf.origin,
        "lambda": lambda_of(p, cfg.kappa),
        "sqrt_delta": sqrt_delta_of(p, cfg.kappa),
        "chart": chart_matrix(cfg.tag, p, cfg.kappa).a,
        "rows": rows,
    }
    _emit(manifest, payload)
    return EXIT_PASS


# --- entry point ----------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="painleve-pencils", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        p.add_argument("--config", required=needs_config, help="key=value config file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", action="append", help="tolerance, or name=value for a named check")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="output file (default stdout)")
        return p

    p = common(sub.add_parser("orbit", help="iterate the Painleve map and check the recurrences"))
    p.add_argument("--steps", type=int, default=12)
    p.add_argument("--autonomous-mismatch", action="store_true",
                   help="iterate with the step switched off and test against the deformed system")
    p = common(sub.add_parser("verify", help="run the invariant suite"), needs_config=False)
    p.add_argument("--orbit", help="re-check the recurrences of a saved orbit JSON")
    common(sub.add_parser("classify", help="characteristic polynomial and pencil type"))
    p = common(sub.add_parser("confine", help="singularity confinement probes"))
    p.add_argument("--index", type=int, action="append", help="base point index 1..8 (default all)")
    p.add_argument("--eps", type=float, default=PROBE_EPS)
    common(sub.add_parser("pencil-info", help="matrices, base points and chart at the origin"))
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and not (args.config or args.orbit):
        parser.error("verify needs --config or --orbit")
    main_tol = "recurrence" if args.command == "orbit" else "default"
    try:
        tols = _parse_tols(args.tol, main_tol)
        manifest = RunManifest(args.config, args.command, args.seed, args.format, args.out, tols)
        if args.command == "orbit":
            if args.steps < 0:
                parser.error("--steps must be nonnegative")
            return cmd_orbit(manifest, args.steps, args.autonomous_mismatch)
        if args.command == "verify":
            return cmd_verify(manifest, args.orbit)
        if args.command == "classify":
            return cmd_classify(manifest, **({"tol": tols["default"]} if "default" in tols else {}))
        if args.command == "confine":
            return cmd_confine(manifest, args.index, args.eps)
        return cmd_pencil_info(manifest)
    except StageError as exc:
        print(f"singular stage {exc.stage}: {exc.cause}", file=sys.stderr)
        return EXIT_STAGE
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (PencilError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
