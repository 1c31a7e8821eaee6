"""Command-line surface: curve generation, figure presets, simulation,
estimation from timestamp files, and engine comparison.

Curve CSVs carry a ``# meta: <json>`` header line followed by
``T,value[,stderr]`` rows.  Manifests and verdicts are JSON documents that
validate against the schema files shipped in ``photonwait/schemas``.  All
output files are written atomically (temp + rename) and every command is
deterministic given its full flag set, seeds included.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 data-format
error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import closedform, exact, mcsim
from .closedform import UnsupportedRegimeError
from .model import (
    Coherent,
    Detector,
    DistKind,
    DistRequest,
    Dpo,
    Rf,
    Thermal,
    mean_flux,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_DATA = 4

ROOT2 = math.sqrt(2.0)


class DataFormatError(Exception):
    """A timestamp or curve file violates the documented format."""


class NumericalError(Exception):
    """A requested evaluation failed numerically."""


# -------------------------------------------------------------------------
# shared plumbing
# -------------------------------------------------------------------------


def load_schema(name: str) -> dict:
    with resources.files("photonwait.schemas").joinpath(name).open(
        encoding="utf-8"
    ) as fh:
        return json.load(fh)


def _validate_json(obj: dict, schema_name: str) -> None:
    import jsonschema

    jsonschema.validate(obj, load_schema(schema_name))


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_curve_csv(path, meta: dict, grid, values, stderr=None) -> None:
    lines = [f"# meta: {json.dumps(meta, sort_keys=True)}", "T,value" + (",stderr" if stderr is not None else "")]
    if stderr is None:
        for t, v in zip(grid, values):
            lines.append(f"{float(t)!r},{float(v)!r}")
    else:
        for t, v, s in zip(grid, values, stderr):
            lines.append(f"{float(t)!r},{float(v)!r},{float(s)!r}")
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def read_curve_csv(path):
    """Read a curve CSV back into (grid, values, stderr-or-None, meta)."""
    meta = {}
    rows = []
    ncols = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("meta:"):
                    meta = json.loads(body[5:])
                continue
            if line[0].isalpha() or line.startswith("T,"):
                continue  # column header
            parts = line.split(",")
            if ncols is None:
                ncols = len(parts)
            if len(parts) != ncols:
                raise DataFormatError(f"{path}:{lineno}: inconsistent column count")
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: non-numeric field in {line!r}")
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise DataFormatError(f"{path}: expected at least two columns")
    stderr = arr[:, 2] if arr.shape[1] > 2 else None
    return arr[:, 0], arr[:, 1], stderr, meta


def load_record(path) -> mcsim.EventRecord:
    """Load a timestamp file, reporting the first offending line on error."""
    meta: dict = {}
    times = []
    prev = -math.inf
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("meta:"):
                    try:
                        meta = json.loads(body[5:])
                    except json.JSONDecodeError as exc:
                        raise DataFormatError(f"{path}:{lineno}: bad meta JSON ({exc})")
                continue
            try:
                t = float(line)
            except ValueError:
                raise DataFormatError(
                    f"{path}:{lineno}: not a decimal timestamp: {line!r}"
                )
            if t <= prev:
                raise DataFormatError(
                    f"{path}:{lineno}: timestamps must be strictly ascending"
                )
            prev = t
            times.append(t)
    if not times:
        raise DataFormatError(f"{path}: no timestamps found")
    return mcsim.EventRecord(times=np.asarray(times), meta=meta)


def _params_dict(params) -> dict:
    return {k: float(v) for k, v in vars(params).items()}


def _build_source(args, parser):
    src = args.source
    if src == "coherent":
        if args.flux is None:
            parser.error("--source coherent requires --flux")
        return Coherent(flux=args.flux)
    if src == "thermal":
        if args.gamma is None or args.nbar is None:
            parser.error("--source thermal requires --gamma and --nbar")
        return Thermal(gamma=args.gamma, nbar=args.nbar)
    if src == "dpo":
        if args.gamma is None or args.nbar is None:
            parser.error("--source dpo requires --gamma and --nbar")
        return Dpo(gamma=args.gamma, nbar=args.nbar)
    if src == "rf":
        if args.beta is None or args.rabi is None:
            parser.error("--source rf requires --beta and --rabi")
        return Rf(beta=args.beta, rabi=args.rabi)
    parser.error(f"unknown source {src!r}")


def _add_source_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--source", required=True,
                   choices=["coherent", "thermal", "dpo", "rf"])
    p.add_argument("--flux", type=float, help="coherent photon flux")
    p.add_argument("--gamma", type=float, help="thermal/DPO field decay rate")
    p.add_argument("--nbar", type=float, help="thermal/DPO mean photon number")
    p.add_argument("--beta", type=float, help="RF atomic decay rate")
    p.add_argument("--rabi", type=float, help="RF Rabi frequency")
    p.add_argument("--eta", type=float, default=1.0, help="detector efficiency")


def _curve_meta(params, det, kind, n, engine, seed=None) -> dict:
    return {
        "source": type(params).__name__.lower(),
        "params": _params_dict(params),
        "eta": det.eta,
        "kind": kind.value,
        "n": n,
        "engine": engine,
        "seed": seed,
    }


# -------------------------------------------------------------------------
# curve
# -------------------------------------------------------------------------


def _mc_curve(params, det, kind, n, grid, events, seed, starts):
    cfg = mcsim.SimConfig(n_events=events, seed=seed)
    record = mcsim.simulate(params, det, cfg)
    if kind is DistKind.CONDITIONAL_WAIT:
        centers = 0.5 * (grid[:-1] + grid[1:])
        vals, se = mcsim.estimate_wn(record, n, grid)
        return centers, vals, se
    if kind is DistKind.UNCONDITIONAL_WAIT:
        centers = 0.5 * (grid[:-1] + grid[1:])
        vals, se = mcsim.estimate_pn(record, n, grid, starts, seed + 2)
        return centers, vals, se
    # photocount: one estimate per window length on the grid
    vals = np.empty(grid.size)
    ses = np.empty(grid.size)
    for i, T in enumerate(grid):
        if T <= 0.0:
            vals[i] = 1.0 if n == 0 else 0.0
            ses[i] = 0.0
            continue
        probs, se = mcsim.estimate_photocount(record, float(T), n)
        vals[i], ses[i] = probs[n], se[n]
    return grid, vals, ses


def cmd_curve(args, parser) -> int:
    params = _build_source(args, parser)
    det = Detector(eta=args.eta)
    kind = DistKind(args.kind)
    request = DistRequest(kind=kind, n=args.n, engine=args.engine)
    grid = np.linspace(0.0, args.tmax, args.points)
    seed = args.seed
    if args.engine == "mc":
        xs, values, stderr = _mc_curve(
            params, det, kind, args.n, grid, args.events, seed, args.starts
        )
    else:
        curve = exact.sample_curve(params, det, request, grid)
        xs, values, stderr = curve.grid, curve.values, None
        seed = None
    if not np.all(np.isfinite(values)):
        raise NumericalError("curve evaluation produced non-finite values")
    meta = _curve_meta(params, det, kind, args.n, args.engine, seed)
    if args.format == "csv":
        _write_curve_csv(args.out, meta, xs, values, stderr)
    else:
        doc = dict(meta)
        doc["grid"] = [float(t) for t in xs]
        doc["values"] = [float(v) for v in values]
        doc["stderr"] = None if stderr is None else [float(s) for s in stderr]
        _validate_json(doc, "curve.schema.json")
        _atomic_write(Path(args.out), json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return EXIT_OK


# -------------------------------------------------------------------------
# figure presets (frozen table)
# -------------------------------------------------------------------------


def _series(source, params, eta, kind, n, engine, tmax, points,
            panel="", style="solid"):
    return {
        "source": source, "params": params, "eta": eta, "kind": kind,
        "n": n, "engine": engine, "tmax": tmax, "points": points,
        "panel": panel, "style": style,
    }


def _figure_series(index: int) -> list[dict]:
    out = []
    if index == 1:
        p = {"gamma": 1.0, "nbar": 0.01}
        for kind, panel in (("w", "a"), ("P", "b")):
            for n in (1, 2, 3):
                out.append(_series("thermal", p, 1.0, kind, n, "exact",
                                   400.0, 800, panel))
                out.append(_series("thermal", p, 1.0, kind, n,
                                   "closed:small-nbar", 400.0, 800, panel,
                                   "dashed"))
        # short-time detail of w1 (inset)
        out.append(_series("thermal", p, 1.0, "w", 1, "exact", 5.0, 200,
                           "inset"))
    elif index == 2:
        p = {"gamma": 1.0, "nbar": 10.0}
        for kind, panel in (("w", "a"), ("P", "b")):
            for n in (1, 2, 3):
                out.append(_series("thermal", p, 1.0, kind, n, "exact",
                                   0.5, 400, panel))
                out.append(_series("thermal", p, 1.0, kind, n,
                                   "closed:large-nbar", 0.5, 400, panel,
                                   "dashed"))
    elif index == 3:
        p = {"gamma": 1.0, "nbar": 0.01}
        for kind, panel in (("w", "a"), ("P", "b")):
            for n in (1, 2, 3):
                out.append(_series("dpo", p, 1.0, kind, n, "exact",
                                   400.0, 800, panel))
                out.append(_series("dpo", p, 1.0, kind, n,
                                   "closed:small-nbar", 400.0, 800, panel,
                                   "dashed"))
    elif index == 4:
        p = {"gamma": 1.0, "nbar": 10.0}
        for kind, panel in (("w", "a"), ("P", "b")):
            for n in (1, 2, 3):
                out.append(_series("dpo", p, 1.0, kind, n, "exact",
                                   0.5, 400, panel))
                out.append(_series("dpo", p, 1.0, kind, n,
                                   "closed:large-nbar", 0.5, 400, panel,
                                   "dashed"))
    elif index == 5:
        p = {"gamma": 1.0, "nbar": 0.01}
        for kind, panel in (("w", "a"), ("P", "b")):
            for n in (1, 2):
                for eta in (1.0, 0.5, 0.1):
                    out.append(_series("dpo", p, eta, kind, n, "exact",
                                       1500.0, 600, panel))
                    out.append(_series("dpo", p, eta, kind, n,
                                       "closed:small-nbar-nonunit",
                                       1500.0, 600, panel, "dashed"))
    elif index == 6:
        weak = {"beta": 1.0, "rabi": 0.2 * ROOT2}
        strong = {"beta": 1.0, "rabi": 10.0 * ROOT2}
        for n in (1, 2, 3):
            out.append(_series("rf", weak, 1.0, "w", n, "closed:exact-n",
                               12.0, 600, "a"))
            out.append(_series("rf", strong, 1.0, "w", n, "closed:exact-n",
                               12.0, 1200, "b"))
            out.append(_series("rf", strong, 1.0, "w", n,
                               "closed:strong-field", 12.0, 1200, "b",
                               "dashed"))
            out.append(_series("rf", weak, 1.0, "P", n, "closed:exact-n",
                               12.0, 600, "c"))
            out.append(_series("rf", strong, 1.0, "P", n, "closed:exact-n",
                               12.0, 1200, "d"))
    elif index == 7:
        p = {"beta": 1.0, "rabi": 1.0}
        for kind, panel in (("w", "a"), ("P", "b")):
            for n in (1, 2, 3):
                out.append(_series("rf", p, 1.0, kind, n, "closed:exact-n",
                                   20.0, 400, panel))
    elif index == 8:
        p = {"beta": 1.0, "rabi": 5.0 * ROOT2}
        flux = p["beta"] * p["rabi"] ** 2 / (p["rabi"] ** 2 + 2 * p["beta"] ** 2)
        coh = {"flux": flux}
        panels = {("w", 1): "a", ("w", 2): "b", ("P", 1): "c", ("P", 2): "d"}
        for (kind, n), panel in panels.items():
            engine = "closed:jform" if kind == "w" else "closed:exact-n"
            for eta in (1.0, 0.5, 0.1):
                out.append(_series("rf", p, eta, kind, n, engine,
                                   60.0, 2400, panel))
                # matched-flux ideal-laser reference
                out.append(_series("coherent", coh, eta, kind, n, "exact",
                                   60.0, 2400, panel, "dashed"))
    else:
        raise IndexError(f"figure index {index} not in 1..8")
    return out


_SOURCE_TYPES = {"coherent": Coherent, "thermal": Thermal, "dpo": Dpo, "rf": Rf}


def _series_filename(index: int, s: dict, multi_eta: bool) -> str:
    parts = [f"fig{index}", f"{s['kind']}{s['n']}"]
    if s["source"] == "coherent" and index == 8:
        parts.append("coh")
    parts.append(s["engine"].replace(":", "-"))
    if multi_eta:
        parts.append(f"eta{s['eta']:g}".replace(".", "p"))
    if s["panel"]:
        parts.append(s["panel"])
    return "_".join(parts) + ".csv"


def cmd_figure(args, parser) -> int:
    try:
        series = _figure_series(args.index)
    except IndexError as exc:
        parser.error(str(exc))
    outdir = Path(args.outdir)
    multi_eta = len({s["eta"] for s in series}) > 1
    files = []
    for s in series:
        params = _SOURCE_TYPES[s["source"]](**s["params"])
        det = Detector(eta=s["eta"])
        kind = DistKind(s["kind"])
        request = DistRequest(kind=kind, n=s["n"], engine=s["engine"])
        grid = np.linspace(0.0, s["tmax"], s["points"])
        curve = exact.sample_curve(params, det, request, grid)
        if not np.all(np.isfinite(curve.values)):
            raise NumericalError(
                f"figure {args.index} series {s} produced non-finite values"
            )
        name = _series_filename(args.index, s, multi_eta)
        meta = _curve_meta(params, det, kind, s["n"], s["engine"])
        meta["figure"] = args.index
        meta["panel"] = s["panel"]
        meta["style"] = s["style"]
        _write_curve_csv(outdir / name, meta, curve.grid, curve.values)
        entry = {
            "path": name,
            "source": s["source"],
            "params": s["params"],
            "eta": s["eta"],
            "kind": s["kind"],
            "n": s["n"],
            "engine": s["engine"],
            "panel": s["panel"],
            "style": s["style"],
        }
        files.append(entry)

    def _collapse(vals):
        uniq = sorted(set(vals), key=str)
        return uniq[0] if len(uniq) == 1 else list(uniq)

    primary = [f for f in files if f["source"] != "coherent"] or files
    manifest = {
        "figure": args.index,
        "source": _collapse([f["source"] for f in files]),
        "params": primary[0]["params"],
        "eta": _collapse([f["eta"] for f in files]),
        "kind": _collapse([f["kind"] for f in files]),
        "n": _collapse([f["n"] for f in files]),
        "engine": _collapse([f["engine"] for f in files]),
        "seed": None,
        "files": files,
        "tolerances": None,
    }
    _validate_json(manifest, "manifest.schema.json")
    _atomic_write(
        outdir / f"fig{args.index}_manifest.json",
        json.dumps(manifest, sort_keys=True, indent=1) + "\n",
    )
    return EXIT_OK


# -------------------------------------------------------------------------
# simulate
# -------------------------------------------------------------------------


def cmd_simulate(args, parser) -> int:
    params = _build_source(args, parser)
    det = Detector(eta=args.eta)
    if (args.duration is None) == (args.events is None):
        parser.error("give exactly one of --duration or --events")
    if args.duration is not None:
        target = args.duration * det.eta * mean_flux(params)
        n_events = int(target * 1.05 + 1000.0)
    else:
        n_events = args.events
    cfg = mcsim.SimConfig(
        n_events=n_events,
        seed=args.seed,
        fock_cutoff=args.fock_cutoff,
        dt_factor=args.dt_factor,
    )
    record = mcsim.simulate(params, det, cfg)
    if args.duration is not None:
        times = record.times[record.times <= args.duration]
        meta = dict(record.meta)
        meta["duration"] = args.duration
        record = mcsim.EventRecord(times=times, meta=meta)
    record.save(args.out)
    return EXIT_OK


# -------------------------------------------------------------------------
# estimate
# -------------------------------------------------------------------------


def cmd_estimate(args, parser) -> int:
    record = load_record(args.events)
    kind = DistKind(args.kind)
    if args.moments:
        if kind is DistKind.PHOTOCOUNT:
            parser.error("--moments applies to wait kinds only")
        (m, m_se), (v, v_se) = mcsim.estimate_wait_moments(record, args.n)
        doc = {
            "kind": kind.value,
            "n": args.n,
            "mean": m, "mean_stderr": m_se,
            "variance": v, "variance_stderr": v_se,
            "events": len(record),
        }
        _atomic_write(Path(args.out), json.dumps(doc, sort_keys=True, indent=1) + "\n")
        return EXIT_OK
    meta = {
        "source": record.meta.get("source", "external"),
        "params": record.meta.get("params", {}),
        "eta": record.meta.get("eta", 1.0),
        "kind": kind.value,
        "n": args.n,
        "engine": "mc",
        "seed": args.seed,
    }
    if kind is DistKind.PHOTOCOUNT:
        if args.window is None:
            parser.error("--kind p requires --window")
        probs, se = mcsim.estimate_photocount(record, args.window, args.n)
        meta["window"] = args.window
        meta["column"] = "count"
        _write_curve_csv(args.out, meta, np.arange(args.n + 1), probs, se)
        return EXIT_OK
    if args.tmax is None:
        parser.error("wait kinds require --tmax")
    edges = np.linspace(0.0, args.tmax, args.bins + 1)
    if kind is DistKind.CONDITIONAL_WAIT:
        vals, se = mcsim.estimate_wn(record, args.n, edges)
    else:
        vals, se = mcsim.estimate_pn(record, args.n, edges, args.starts, args.seed)
    centers = 0.5 * (edges[:-1] + edges[1:])
    _write_curve_csv(args.out, meta, centers, vals, se)
    return EXIT_OK


# -------------------------------------------------------------------------
# compare
# -------------------------------------------------------------------------


def _bin_average(params, det, request, edges, nsub=9):
    """Reference curve averaged over each bin (trapezoid on a subgrid) so
    oscillatory densities compare fairly against histograms."""
    out = np.empty(edges.size - 1)
    for i in range(edges.size - 1):
        sub = np.linspace(edges[i], edges[i + 1], nsub)
        vals = exact.sample_curve(params, det, request, sub).values
        out[i] = np.trapezoid(vals, sub) / (edges[i + 1] - edges[i])
    return out


def cmd_compare(args, parser) -> int:
    params = _build_source(args, parser)
    det = Detector(eta=args.eta)
    kind = DistKind(args.kind)
    engines = [args.engine_a, args.engine_b]
    grid = np.linspace(0.0, args.tmax, args.points)
    verdict: dict = {
        "max_rel_err": None,
        "max_abs_diff": None,
        "frac_within_2se": None,
        "points_checked": 0,
    }
    tolerances = {"rel_err": args.tol, "min_frac_within_2se": args.min_frac}
    if "mc" in engines:
        ref_engine = engines[0] if engines[1] == "mc" else engines[1]
        request = DistRequest(kind=kind, n=args.n, engine=ref_engine)
        if kind is DistKind.PHOTOCOUNT:
            parser.error("mc comparison supports wait kinds only")
        ref = _bin_average(params, det, request, grid)
        centers, vals, se = _mc_curve(
            params, det, kind, args.n, grid, args.events, args.seed, args.starts
        )
        ok = se > 0
        within = np.abs(vals[ok] - ref[ok]) <= 2.0 * se[ok]
        frac = float(within.mean())
        verdict["frac_within_2se"] = frac
        verdict["points_checked"] = int(ok.sum())
        verdict["max_abs_diff"] = float(np.max(np.abs(vals - ref)))
        status = "PASS" if frac >= args.min_frac else "FAIL"
        seed = args.seed
    else:
        req_a = DistRequest(kind=kind, n=args.n, engine=engines[0])
        req_b = DistRequest(kind=kind, n=args.n, engine=engines[1])
        a = exact.sample_curve(params, det, req_a, grid).values
        b = exact.sample_curve(params, det, req_b, grid).values
        peak = max(np.max(np.abs(a)), np.max(np.abs(b)))
        if peak == 0.0 or not np.isfinite(peak):
            raise NumericalError("comparison curves degenerate or non-finite")
        mask = np.abs(a) > 0.01 * peak
        rel = np.abs(a[mask] - b[mask]) / np.abs(a[mask])
        verdict["max_rel_err"] = float(rel.max()) if rel.size else 0.0
        verdict["max_abs_diff"] = float(np.max(np.abs(a - b)))
        verdict["points_checked"] = int(mask.sum())
        status = "PASS" if verdict["max_rel_err"] < args.tol else "FAIL"
        seed = None
    verdict["status"] = status
    doc = {
        "source": args.source,
        "params": _params_dict(params),
        "eta": det.eta,
        "kind": kind.value,
        "n": args.n,
        "engine": engines,
        "seed": seed,
        "verdict": verdict,
        "tolerances": tolerances,
    }
    _validate_json(doc, "verdict.schema.json")
    text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    if args.out:
        _atomic_write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if status == "PASS" else EXIT_NUMERICAL


# -------------------------------------------------------------------------
# parser / entry point
# -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonwait",
        description="Photocount and wait-time distributions for coherent, "
        "thermal, DPO, and resonance-fluorescence light.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="evaluate one distribution on a grid")
    _add_source_flags(p)
    p.add_argument("--kind", required=True, choices=["p", "P", "w"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--engine", default="exact",
                   help="exact | closed[:<regime>] | mc")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--events", type=int, default=200_000,
                   help="mc engine: events to simulate")
    p.add_argument("--starts", type=int, default=200_000,
                   help="mc engine: window starts for kind P")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("figure", help="emit the curve set for a preset figure")
    p.add_argument("index", type=int, help="figure preset 1..8")
    p.add_argument("--outdir", default=".")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("simulate", help="generate a detection timestamp file")
    _add_source_flags(p)
    p.add_argument("--duration", type=float, help="record length in time units")
    p.add_argument("--events", type=int, help="alternative: event count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fock-cutoff", type=int, default=None)
    p.add_argument("--dt-factor", type=float, default=0.04)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate distributions from a timestamp file")
    p.add_argument("--events", required=True, help="timestamp file path")
    p.add_argument("--kind", required=True, choices=["p", "P", "w"])
    p.add_argument("--n", type=int, required=True,
                   help="order (max count for kind p)")
    p.add_argument("--tmax", type=float, default=None)
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--starts", type=int, default=200_000)
    p.add_argument("--window", type=float, default=None,
                   help="kind p: counting window length")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--moments", action="store_true",
                   help="report wait-time mean/variance as JSON instead")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("compare", help="run two engines and emit a JSON verdict")
    _add_source_flags(p)
    p.add_argument("--kind", required=True, choices=["p", "P", "w"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--engine-a", required=True)
    p.add_argument("--engine-b", required=True)
    p.add_argument("--tol", type=float, default=1e-6,
                   help="max relative error where density > 1%% of peak")
    p.add_argument("--min-frac", type=float, default=0.95,
                   help="mc: minimum fraction of bins within 2 stderr")
    p.add_argument("--events", type=int, default=200_000)
    p.add_argument("--starts", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (UnsupportedRegimeError, NumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
