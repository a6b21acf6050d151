"""Command line runner: ``gblab probe | identities | witness``.

Settings come from an optional JSON config file (``--config``); flags given
on the command line override it.  Exit status is 0 on success, 1 on invalid
input or failed checks, 2 on usage errors and 3 on solver breakdown.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io as gio
from .cochains import Cochain0, Cochain1, Section, inner_section
from .errors import GBLabError, InsufficientDepth, NoConvergence, SolverBreakdown
from .families import FAMILIES, family_spec
from .graph import ball
from .lab import (
    CONVENTIONS,
    classical_capacity,
    delta_kernel_outside,
    fit_slope,
    nonparabolicity_constant,
    place_U,
    probe_decay,
    triadic_witness,
)
from .operators import (
    adjointness_bound,
    check_adjointness,
    commutator_chi_d,
    commutator_chi_d_direct,
    commutator_chi_delta,
    commutator_chi_delta_direct,
    delta,
    derivation_d,
    derivation_delta,
    gauss_bonnet,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3

DEFAULTS = {
    "family": None,
    "graph_file": None,
    "radii": None,
    "probe": "nonparabolicity",
    "out": None,
    "json": None,
    "tol": 1e-12,
    "threshold": 1e-3,
    "threads": None,
    "timing": False,
    "rays": None,
    "branching": None,
    "weights": "simple",
    "k": None,
    "u_rule": "boundary",
    "u_distance": 1,
    "convention": "full",
    "buffer": None,
    "M": 6,
    "kind": None,
    "radius": None,
    "vertex": None,
    "trials": 20,
    "seed": 0,
}
PROBES = ("nonparabolicity", "capacity", "kernel")


def parse_radii(text) -> list[int]:
    """``"3..8"`` (inclusive), ``"3,5,9"`` or a JSON list."""
    if isinstance(text, list):
        vals = [int(x) for x in text]
    else:
        text = str(text).strip()
        try:
            if ".." in text:
                a, b = text.split("..")
                vals = list(range(int(a), int(b) + 1))
            else:
                vals = [int(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise gio.ParseError(f"cannot read radii from {text!r}", where="radii") from None
    if not vals:
        raise gio.ParseError("radius list is empty", where="radii")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise gio.ParseError("radii must be strictly increasing", where="radii")
    if vals[0] < 1:
        raise gio.ParseError("radii must be positive", where="radii")
    return vals


def _settings(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        data = gio.read_json_file(args.config)
        if not isinstance(data, dict):
            raise gio.ParseError("config must be a JSON object", where=args.config)
        for key, val in data.items():
            norm = key.replace("-", "_")
            if norm not in DEFAULTS:
                raise gio.ParseError(f"unknown config field {key!r}", where=f"{args.config}:{key}")
            cfg[norm] = val
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            cfg[key] = val
    if cfg["threads"] is None:
        env = os.environ.get("GBLAB_THREADS")
        try:
            cfg["threads"] = int(env) if env else 1
        except ValueError:
            raise gio.ParseError(f"GBLAB_THREADS={env!r} is not an integer", where="GBLAB_THREADS") from None
    for key in ("tol", "threshold"):
        if not float(cfg[key]) > 0:
            raise gio.ParseError("must be positive", where=key)
    if int(cfg["threads"]) < 1:
        raise gio.ParseError("must be >= 1", where="threads")
    if cfg["convention"] not in CONVENTIONS:
        raise gio.ParseError(f"must be one of {CONVENTIONS}", where="convention")
    return cfg


def _spec(cfg):
    params = {}
    if cfg["rays"] is not None:
        params["rays"] = int(cfg["rays"])
    if cfg["branching"] is not None:
        params["branching"] = int(cfg["branching"])
    return family_spec(cfg["family"], weights=cfg["weights"], k=cfg["k"], **params)


def _emit(text: str, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _graph_file_probe(cfg) -> list:
    g = gio.load_graph(cfg["graph_file"])
    o = g.origin if g.origin is not None else 0
    K = ball(g, o, int(cfg["k"] or 0))
    U = place_U(g, K, cfg["u_rule"], int(cfg["u_distance"]))
    rep = nonparabolicity_constant(
        g, K, U, int(cfg["buffer"] or 1), convention=cfg["convention"], family=g.name or "file"
    )
    rep.verdict = "FAIL" if rep.kernel_hit or rep.C < float(cfg["threshold"]) else "PASS"
    return [rep]


def _capacity_rows(cfg, radii):
    spec = _spec(cfg)
    g = spec.build(radii[-1] + 1)
    o = spec.origin(g)
    rows = []
    for N in radii:
        t0 = time.perf_counter()
        cap = classical_capacity(g, o, N)
        rows.append({"family": spec.tag, "radius": N, "M": N, "C": cap, "kernel_dim": None,
                     "wall_ms": (time.perf_counter() - t0) * 1e3})
    slope = fit_slope([r["M"] for r in rows], [r["C"] for r in rows])
    ok = min(r["C"] for r in rows) >= float(cfg["threshold"]) and not (slope < -0.1)
    for r in rows:
        r.update(slope=slope, verdict="PASS" if ok else "FAIL")
    return rows


def _kernel_rows(cfg, radii):
    spec = _spec(cfg)

    def one(R):
        t0 = time.perf_counter()
        g = spec.build(R)
        K = ball(g, spec.origin(g), spec.k)
        dim, _ = delta_kernel_outside(g, K, convention=cfg["convention"])
        return {"family": spec.tag, "radius": R, "M": None, "C": None, "kernel_dim": dim,
                "slope": math.nan, "verdict": "FAIL" if dim else "PASS",
                "wall_ms": (time.perf_counter() - t0) * 1e3}

    with ThreadPoolExecutor(max_workers=int(cfg["threads"])) as pool:
        return list(pool.map(one, radii))


def cmd_probe(cfg) -> int:
    probe = cfg["probe"]
    if probe not in PROBES:
        raise gio.ParseError(f"must be one of {PROBES}", where="probe")
    reports = None
    if cfg["graph_file"]:
        if probe != "nonparabolicity":
            raise gio.ParseError("graph files support only the nonparabolicity probe", where="probe")
        reports = _graph_file_probe(cfg)
        rows = [r.row() for r in reports]
    else:
        if not cfg["family"]:
            raise gio.ParseError("give --family or --graph-file", where="family")
        radii = parse_radii(cfg["radii"] if cfg["radii"] is not None else "3..8")
        if probe == "nonparabolicity":
            reports = probe_decay(
                _spec(cfg),
                radii,
                u_rule=cfg["u_rule"],
                u_distance=int(cfg["u_distance"]),
                convention=cfg["convention"],
                threshold=float(cfg["threshold"]),
                buffer_radius=None if cfg["buffer"] is None else int(cfg["buffer"]),
                threads=int(cfg["threads"]),
                timing=True,
            )
            rows = [r.row() for r in reports]
        elif probe == "capacity":
            rows = _capacity_rows(cfg, radii)
        else:
            rows = _kernel_rows(cfg, radii)
    _emit(gio.probe_csv_text(rows, timing=bool(cfg["timing"])), cfg["out"])
    if cfg["json"]:
        if reports is not None:
            payload = [gio.report_to_dict(r) for r in reports]
            if not cfg["timing"]:
                for p in payload:
                    p["wall_ms"] = None
        else:
            payload = [{k: gio._jsonable(v) for k, v in r.items()} for r in rows]
        _emit(json.dumps({"format": "gblab-probe-json v1", "reports": payload}, indent=1) + "\n", cfg["json"])
    return EXIT_OK


def _random_weights(g, rng):
    from .graph import build_graph

    return build_graph(
        rng.uniform(0.5, 2.0, g.n_vertices),
        zip(g.tail.tolist(), g.head.tolist(), rng.uniform(0.5, 2.0, g.n_edges).tolist()),
        frontier=np.flatnonzero(g.frontier),
        labels=g.labels,
        origin=g.origin,
    )


def identity_residuals(g, rng, trials: int) -> dict:
    """Worst residual of every algebraic identity over random inputs on ``g``."""
    worst = {k: 0.0 for k in ("adjointness", "symmetry", "delta_forms", "derivation_d",
                              "derivation_delta", "commutator_d", "commutator_delta")}
    o = g.origin if g.origin is not None else 0
    for _ in range(trials):
        f = Cochain0(g, rng.standard_normal(g.n_vertices))
        h = Cochain0(g, rng.standard_normal(g.n_vertices))
        phi = Cochain1(g, rng.standard_normal(g.n_edges))
        psi = Cochain1(g, rng.standard_normal(g.n_edges))
        K = ball(g, o, int(rng.integers(0, 3)))
        scale = adjointness_bound(f, phi) / 1e-12
        worst["adjointness"] = max(worst["adjointness"], check_adjointness(f, phi) / scale)
        s, t = Section(f, phi), Section(h, psi)
        sym = abs(inner_section(gauss_bonnet(s), t) - inner_section(s, gauss_bonnet(t)))
        worst["symmetry"] = max(worst["symmetry"], sym / scale)
        dd = np.abs(delta(phi).values - delta(phi, method="sum").values).max()
        worst["delta_forms"] = max(worst["delta_forms"], dd)
        worst["derivation_d"] = max(worst["derivation_d"], np.abs(derivation_d(f, h)).max())
        worst["derivation_delta"] = max(worst["derivation_delta"], np.abs(derivation_delta(f, phi)).max())
        cd = np.abs((commutator_chi_d(K, f) - commutator_chi_d_direct(K, f)).values).max()
        worst["commutator_d"] = max(worst["commutator_d"], cd)
        cl = np.abs((commutator_chi_delta(K, phi) - commutator_chi_delta_direct(K, phi)).values).max()
        worst["commutator_delta"] = max(worst["commutator_delta"], cl)
    return worst


def cmd_identities(cfg) -> int:
    rng = np.random.default_rng(int(cfg["seed"]))
    if cfg["graph_file"]:
        graphs = [gio.load_graph(cfg["graph_file"])]
    else:
        spec = _spec({**cfg, "family": cfg["family"] or "grid2"})
        radii = parse_radii(cfg["radii"] if cfg["radii"] is not None else "4..6")
        graphs = [_random_weights(spec.build(R), rng) for R in radii]
    tol = float(cfg["tol"])
    worst = {}
    for g in graphs:
        for k, v in identity_residuals(g, rng, int(cfg["trials"])).items():
            worst[k] = max(worst.get(k, 0.0), float(v))
    ok = True
    for k, v in worst.items():
        status = "ok" if v < tol else "FAIL"
        ok &= v < tol
        print(f"{k:18s} {v:.3e}  {status}")
    print(f"{'all':18s} {'pass' if ok else 'fail'} (tol {tol:g}, {len(graphs)} graph(s))")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_witness(cfg) -> int:
    fam = cfg["family"] or "triadic"
    kind = cfg["kind"] or ("triadic" if fam in ("triadic", "tree") else "kernel")
    spec = _spec({**cfg, "family": fam})
    if kind == "triadic":
        M = int(cfg["M"])
        R = int(cfg["radius"]) if cfg["radius"] is not None else M + 2
        g = spec.build(R)
        x = int(cfg["vertex"]) if cfg["vertex"] is not None else spec.origin(g)
        phi, diag = triadic_witness(g, x, M)
        payload = {
            "kind": "triadic",
            "family": spec.tag,
            "radius": R,
            "vertex": x,
            "cochain": gio.cochain_to_dict(phi),
            "diagnostics": gio._jsonable(diag),
        }
        payload["ratio"] = diag["ratio"]
    elif kind == "kernel":
        R = int(cfg["radius"]) if cfg["radius"] is not None else 7
        g = spec.build(R)
        K = ball(g, spec.origin(g), spec.k)
        dim, basis = delta_kernel_outside(g, K, convention=cfg["convention"])
        worst = max((float(np.abs(delta(b).values).max()) for b in basis), default=0.0)
        payload = {
            "kind": "kernel",
            "family": spec.tag,
            "radius": R,
            "K": K.tolist(),
            "dimension": dim,
            "max_abs_delta": worst,
            "basis": [gio.cochain_to_dict(b) for b in basis],
        }
    else:
        raise gio.ParseError("must be 'triadic' or 'kernel'", where="kind")
    _emit(json.dumps(payload, indent=1) + "\n", cfg["out"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gblab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override its fields")
        p.add_argument("--family", choices=sorted(FAMILIES))
        p.add_argument("--graph-file", dest="graph_file")
        p.add_argument("--radii", help="A..B, or a comma list")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--tol", type=float)
        p.add_argument("--threads", type=int, help="worker threads (default $GBLAB_THREADS or 1)")
        p.add_argument("--rays", type=int)
        p.add_argument("--branching", type=int)
        p.add_argument("--weights", choices=("simple", "electrical"))
        p.add_argument("--k", type=int, help="K = ball(origin, k)")
        p.add_argument("--convention", choices=CONVENTIONS)
        p.add_argument("--seed", type=int)

    p = sub.add_parser("probe", help="sweep truncation radii and write a CSV report")
    common(p)
    p.add_argument("--probe", choices=PROBES)
    p.add_argument("--json", help="also write a JSON report with witnesses")
    p.add_argument("--timing", action="store_true", help="fill the wall_ms column")
    p.add_argument("--threshold", type=float)
    p.add_argument("--u-rule", dest="u_rule", choices=("boundary", "vertex"))
    p.add_argument("--u-distance", dest="u_distance", type=int)
    p.add_argument("--buffer", type=int, help="minimum distance from K and U to the frontier")

    p = sub.add_parser("identities", help="check the algebraic identities on random inputs")
    common(p)
    p.add_argument("--trials", type=int)

    p = sub.add_parser("witness", help="export a witness 1-cochain as JSON")
    common(p)
    p.add_argument("--kind", choices=("triadic", "kernel"))
    p.add_argument("--M", dest="M", type=int)
    p.add_argument("--radius", type=int)
    p.add_argument("--vertex", type=int)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _settings(args)
        handler = {"probe": cmd_probe, "identities": cmd_identities, "witness": cmd_witness}[args.command]
        return handler(cfg)
    except InsufficientDepth as exc:
        need = f" (needs depth >= {exc.required_depth})" if exc.required_depth is not None else ""
        print(f"gblab: error: {exc}{need}", file=sys.stderr)
        return EXIT_FAIL
    except (SolverBreakdown, NoConvergence) as exc:
        print(f"gblab: solver breakdown: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (GBLabError, OSError) as exc:
        print(f"gblab: error: {exc}", file=sys.stderr)
        return EXIT_FAIL
