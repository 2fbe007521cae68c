"""Command-line runner: ``telab <experiment> --config cfg.json --out DIR``.

Every run validates its JSON config, writes its artifacts atomically into the
output directory and finishes with ``manifest.json`` listing each file with
its SHA-256.  Exit codes: 0 success, 2 invalid config, 3 solver failure,
4 I/O failure.  Errors are reported as one JSON object on stderr.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import os
import platform
import sys
import time
import warnings

import numpy as np

from . import __version__
from .errors import ConfigError, ParseError, SolverError, TelabError
from .io import sha256_file, write_farfield, write_grid_csv, write_json

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4

EXPERIMENTS = (
    "simulate",
    "farfield",
    "lsm",
    "te-radial",
    "te-grid",
    "probe-corner",
    "probe-surface",
    "herglotz-fit",
    "calderon-demo",
    "te-scan",
    "invisibility",
)

_COMMON = {"experiment", "output", "seed", "solver"}
_KEYS = {
    "simulate": {"medium", "grid", "k", "incident"},
    "farfield": {"medium", "grid", "k", "quadrature", "noise"},
    "lsm": {"medium", "grid", "k", "quadrature", "noise", "mesh", "eps_rel", "cutoff"},
    "te-radial": {"radius", "contrast", "m_max", "k_min", "k_max"},
    "te-grid": {"medium", "grid", "window", "max_modes", "method"},
    "probe-corner": {"medium", "grid", "window", "max_modes", "radii"},
    "probe-surface": {"radius", "contrast", "m_max", "eps"},
    "herglotz-fit": {"target", "grid", "k", "quadrature", "alphas"},
    "calderon-demo": {"n", "extent", "bump"},
    "te-scan": {"medium", "grid", "k_range", "step", "probes", "quadrature", "eps_rel", "prominence_factor"},
    "invisibility": {"medium", "grid", "k", "quadrature", "alphas", "control_k"},
}
_SOLVER_KEYS = {"tol", "maxiter", "dense_limit"}


# -- config validation --------------------------------------------------------


def _need(cfg, key, where="config"):
    if key not in cfg:
        raise ConfigError(f"{where}: missing key {key!r}")
    return cfg[key]


def _number(x, name, lo=None, hi=None, strict_lo=False, integer=False):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise ConfigError(f"{name} must be a finite number, got {x!r}")
    if integer and int(x) != x:
        raise ConfigError(f"{name} must be an integer, got {x!r}")
    if lo is not None and (x <= lo if strict_lo else x < lo):
        raise ConfigError(f"{name} must be {'>' if strict_lo else '>='} {lo}, got {x}")
    if hi is not None and x > hi:
        raise ConfigError(f"{name} must be <= {hi}, got {x}")
    return int(x) if integer else float(x)


def _point(p, name):
    if not isinstance(p, (list, tuple)) or len(p) != 2:
        raise ConfigError(f"{name} must be a 2-element list")
    return tuple(_number(c, name) for c in p)


def _only(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be an object")
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")


def build_domain(d):
    from .geometry import Disk, Polygon

    _only(d, {"kind", "center", "radius", "vertices"}, "medium.domain")
    kind = _need(d, "kind", "medium.domain")
    try:
        if kind == "disk":
            _only(d, {"kind", "center", "radius"}, "medium.domain")
            return Disk(_point(d.get("center", [0.0, 0.0]), "center"), _number(_need(d, "radius", "disk"), "radius", 0, strict_lo=True))
        if kind == "polygon":
            _only(d, {"kind", "vertices"}, "medium.domain")
            return Polygon([_point(v, "vertex") for v in _need(d, "vertices", "polygon")])
    except TelabError as exc:
        raise ConfigError(f"medium.domain: {exc}") from None
    raise ConfigError(f"medium.domain.kind must be 'disk' or 'polygon', got {kind!r}")


def build_medium(m):
    from .forward import Medium

    _only(m, {"domain", "contrast"}, "medium")
    dom = build_domain(_need(m, "domain", "medium"))
    V = _number(_need(m, "contrast", "medium"), "medium.contrast")
    if not 1 + V > 0:
        raise ConfigError(f"medium.contrast must satisfy 1 + V > 0, got V = {V}")
    return Medium(dom, V)


def build_grid(g, domain):
    from .geometry import GridSpec

    _only(g, {"h", "margin"}, "grid")
    h = _number(_need(g, "h", "grid"), "grid.h", 0, strict_lo=True)
    margin = _number(g.get("margin", 2), "grid.margin", 2, integer=True)
    return GridSpec.covering(domain, h, margin)


def build_quadrature(q):
    from .directions import DirectionQuadrature

    q = q or {}
    _only(q, {"n"}, "quadrature")
    return DirectionQuadrature(_number(q.get("n", 64), "quadrature.n", 8, integer=True))


def validate(cfg, experiment=None):
    """Check keys and ranges; returns a normalised deep copy."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    cfg = copy.deepcopy(cfg)
    exp = cfg.get("experiment", experiment)
    if experiment is not None and exp != experiment:
        raise ConfigError(f"config is for {exp!r}, command is {experiment!r}")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {exp!r}")
    cfg["experiment"] = exp
    _only(cfg, _COMMON | _KEYS[exp], "config")
    if "solver" in cfg:
        _only(cfg["solver"], _SOLVER_KEYS, "solver")
    seed = cfg.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    cfg["seed"] = seed
    if "medium" in _KEYS[exp]:
        build_grid(_need(cfg, "grid"), build_medium(_need(cfg, "medium")).domain)
    if "k" in _KEYS[exp] and exp != "invisibility":
        _number(_need(cfg, "k"), "k", 0, strict_lo=True)
    if "quadrature" in _KEYS[exp]:
        build_quadrature(cfg.get("quadrature"))
    if "noise" in cfg:
        _number(cfg["noise"], "noise", 0)
    if "contrast" in _KEYS[exp]:
        V = _number(_need(cfg, "contrast"), "contrast")
        if not 1 + V > 0:
            raise ConfigError(f"contrast must satisfy 1 + V > 0, got V = {V}")
        _number(_need(cfg, "radius"), "radius", 0, strict_lo=True)
        _number(_need(cfg, "m_max"), "m_max", 0, integer=True)
    return cfg


# -- experiments ----------------------------------------------------------------------


def _solver_kw(cfg):
    s = cfg.get("solver", {})
    return {k: s[k] for k in ("tol", "maxiter", "dense_limit") if k in s}


def _run_simulate(cfg, out, strict):
    from .forward import PlaneWave, PointSource, ScatteringSolver

    med = build_medium(cfg["medium"])
    spec = build_grid(cfg["grid"], med.domain)
    inc_cfg = cfg.get("incident", {"kind": "plane", "direction": [1.0, 0.0]})
    _only(inc_cfg, {"kind", "direction", "source"}, "incident")
    if inc_cfg.get("kind") == "plane":
        inc = PlaneWave(_point(inc_cfg.get("direction", [1.0, 0.0]), "incident.direction"))
    elif inc_cfg.get("kind") == "point":
        inc = PointSource(_point(_need(inc_cfg, "source", "incident"), "incident.source"))
        inc.check_placement(med.domain)
    else:
        raise ConfigError("incident.kind must be 'plane' or 'point'")
    k = float(cfg["k"])
    S = ScatteringSolver(med, k, spec, strict=strict, **_solver_kw(cfg))
    res = S.solve(inc)
    files = [
        write_grid_csv(os.path.join(out, "total.csv"), spec, res.total.values, S.mask, k),
        write_grid_csv(os.path.join(out, "scattered.csv"), spec, res.scattered.values, S.mask, k),
    ]
    summary = {"unknowns": int(S.n), "residual": float(res.residual), "scattered_l2": res.scattered.l2_norm(S.mask)}
    files.append(write_json(os.path.join(out, "summary.json"), summary))
    return files


def _farfield(cfg, strict):
    from .herglotz import assemble_far_field_matrix
    from .forward import ScatteringSolver

    med = build_medium(cfg["medium"])
    spec = build_grid(cfg["grid"], med.domain)
    quad = build_quadrature(cfg.get("quadrature"))
    k = float(cfg["k"])
    solver = ScatteringSolver(med, k, spec, strict=True, **_solver_kw(cfg))
    F = assemble_far_field_matrix(med, k, quad, spec, solver=solver)
    if cfg.get("noise", 0):
        F = F.with_noise(float(cfg["noise"]), np.random.default_rng(cfg["seed"]))
    return med, spec, quad, F


def _run_farfield(cfg, out, strict):
    med, spec, quad, F = _farfield(cfg, strict)
    info = {"reciprocity_defect": F.reciprocity_defect(), "circulant_defect": F.circulant_defect()}
    return [write_farfield(os.path.join(out, "farfield.json"), F), write_json(os.path.join(out, "summary.json"), info)]


def _run_lsm(cfg, out, strict):
    from .lsm import DEFAULT_REL_EPS, SamplingMesh, classify, default_eps, indicator_map

    med, spec, quad, F = _farfield(cfg, strict)
    mesh_cfg = cfg.get("mesh", {})
    _only(mesh_cfg, {"xlim", "ylim", "spacing"}, "mesh")
    (xmin, xmax), (ymin, ymax) = med.domain.bbox()
    pad = 0.5 * max(xmax - xmin, ymax - ymin)
    mesh = SamplingMesh.from_bounds(
        _point(mesh_cfg.get("xlim", [xmin - pad, xmax + pad]), "mesh.xlim"),
        _point(mesh_cfg.get("ylim", [ymin - pad, ymax + pad]), "mesh.ylim"),
        _number(mesh_cfg.get("spacing", 0.05), "mesh.spacing", 0, strict_lo=True),
    )
    rel = _number(cfg.get("eps_rel", DEFAULT_REL_EPS), "eps_rel", 0, strict_lo=True)
    res = indicator_map(F, mesh, default_eps(F, rel))
    cut = cfg.get("cutoff", "auto")
    if cut != "auto":
        cut = _number(cut, "cutoff", 0, strict_lo=True)
    mask = classify(res, cut)
    files = [write_grid_csv(os.path.join(out, "indicator.csv"), mesh.grid, res.indicator, mask, F.k)]
    files.append(write_json(os.path.join(out, "lsm.json"), {"eps": res.eps, "cutoff": res.cutoff, "inside_count": int(mask.sum())}))
    return files


def _run_te_radial(cfg, out, strict):
    from .teig import radial_te_roots

    R, V = float(cfg["radius"]), float(cfg["contrast"])
    k_min = _number(_need(cfg, "k_min"), "k_min", 0, strict_lo=True)
    k_max = _number(_need(cfg, "k_max"), "k_max", k_min, strict_lo=True)
    roots = radial_te_roots(int(cfg["m_max"]), k_min, k_max, R, V)
    table = [{"m": m, "k": k, "lambda": k * k} for m, k in roots]
    return [write_json(os.path.join(out, "eigenvalues.json"), {"radius": R, "contrast": V, "roots": table})]


def _grid_pairs(cfg):
    from .teig import grid_eigenpairs

    med = build_medium(cfg["medium"])
    spec = build_grid(cfg["grid"], med.domain)
    lo, hi = _point(_need(cfg, "window"), "window")
    if not 0 < lo < hi:
        raise ConfigError("window must be a positive interval")
    mm = cfg.get("max_modes", 5)
    mm = None if mm is None else _number(mm, "max_modes", 1, integer=True)
    method = cfg.get("method", "auto")
    if method not in ("auto", "dense", "sparse"):
        raise ConfigError("method must be auto, dense or sparse")
    disc, pairs = grid_eigenpairs(med, spec, (lo, hi), mm, method)
    return med, spec, pairs


def _lam_json(lam):
    return [float(np.real(lam)), float(np.imag(lam))]


def _run_te_grid(cfg, out, strict):
    med, spec, pairs = _grid_pairs(cfg)
    files, table = [], []
    for j, p in enumerate(pairs):
        table.append({"index": j, "lambda": _lam_json(p.lam), "residuals": p.residuals, "pencil_residual": p.info["pencil_residual"]})
        kk = float(np.sqrt(np.real(p.lam)))
        files.append(write_grid_csv(os.path.join(out, f"u_{j}.csv"), spec, p.u.values, p.u.mask, kk))
        files.append(write_grid_csv(os.path.join(out, f"v_{j}.csv"), spec, p.v.values, p.v.mask, kk))
    files.append(write_json(os.path.join(out, "eigenvalues.json"), {"modes": table}))
    return files


def _run_probe_corner(cfg, out, strict):
    from .geometry import corners
    from .probes import corner_profile

    med, spec, pairs = _grid_pairs(cfg)
    radii = [_number(r, "radii", 0, strict_lo=True) for r in cfg.get("radii", [0.1, 0.05])]
    recs = []
    lines = ["mode,corner,r,corner_avg,interior_avg,edge_avg"]
    for j, p in enumerate(pairs):
        for c_i, c in enumerate(corners(med.domain)):
            pr = corner_profile(p.v, c, radii, med.domain)
            recs.append({"mode": j, "lambda": _lam_json(p.lam), "corner": c.vertex.tolist(), "angle": c.angle, "ratio": pr.ratio().tolist()})
            for r, a, b, e in zip(pr.radii, pr.corner_avg, pr.interior_avg, pr.edge_avg):
                lines.append(f"{j},{c_i},{r!r},{a!r},{b!r},{e!r}")
    from .io import atomic_write

    return [
        write_json(os.path.join(out, "corner.json"), {"records": recs}),
        atomic_write(os.path.join(out, "corner_profile.csv"), "\n".join(lines) + "\n"),
    ]


def _run_probe_surface(cfg, out, strict):
    from .forward import Medium
    from .geometry import Disk
    from .probes import localization_scan, running_max

    eps = _number(_need(cfg, "eps"), "eps", 0, strict_lo=True)
    med = Medium(Disk((0.0, 0.0), float(cfg["radius"])), float(cfg["contrast"]))
    recs = localization_scan(med, int(cfg["m_max"]), eps)
    rm = running_max(recs)
    rows = [{"m": r.m, "k": r.k, "rho_u": r.rho_u, "rho_v": r.rho_v, "running_max": float(x)} for r, x in zip(recs, rm)]
    return [write_json(os.path.join(out, "localization.json"), {"eps": eps, "records": rows})]


def _run_herglotz_fit(cfg, out, strict):
    from .forward import ComplexField2D, Medium
    from .geometry import Disk, rasterize
    from .herglotz import DEFAULT_ALPHAS, density_growth_profile
    from .teig import radial_eigenpair, radial_te_roots

    t = _need(cfg, "target")
    _only(t, {"kind", "m", "radius", "contrast"}, "target")
    R = _number(t.get("radius", 1.0), "target.radius", 0, strict_lo=True)
    m = _number(t.get("m", 0), "target.m", 0, integer=True)
    dom = Disk((0.0, 0.0), R)
    spec = build_grid(cfg["grid"], dom)
    quad = build_quadrature(cfg.get("quadrature"))
    if t.get("kind") == "bessel":
        k = _number(_need(cfg, "k"), "k", 0, strict_lo=True)
        from . import specialfn as sf

        P = spec.points()
        r, th = np.hypot(P[..., 0], P[..., 1]), np.arctan2(P[..., 1], P[..., 0])
        target = ComplexField2D(spec, sf.bessel_j(m, k * r) * np.exp(1j * m * th), rasterize(dom, spec).mask)
    elif t.get("kind") == "radial-eigenfunction":
        V = _number(t.get("contrast", 1.0), "target.contrast")
        k = [kk for mm, kk in radial_te_roots(m, 0.5, 40.0, R, V) if mm == m][0]
        target = radial_eigenpair(m, k, R, V, spec).v
    else:
        raise ConfigError("target.kind must be 'bessel' or 'radial-eigenfunction'")
    alphas = [float(a) for a in cfg.get("alphas", DEFAULT_ALPHAS)]
    prof = density_growth_profile(target, k, quad, alphas)
    rows = [{"alpha": a, "error": e, "density_norm": g} for a, e, g in prof.table()]
    return [write_json(os.path.join(out, "growth.json"), {"k": k, "rows": rows, "norm_ratio": prof.norm_ratio()})]


def _run_calderon(cfg, out, strict):
    from .geometry import GridSpec
    from .probes import calderon_recover

    n = _number(cfg.get("n", 32), "n", 4, integer=True)
    L = _number(cfg.get("extent", 2.0), "extent", 0, strict_lo=True)
    b = cfg.get("bump", {})
    _only(b, {"amplitude", "width", "center"}, "bump")
    amp = _number(b.get("amplitude", 1.0), "bump.amplitude")
    wid = _number(b.get("width", 0.35), "bump.width", 0, strict_lo=True)
    c = _point(b.get("center", [0.0, 0.0]), "bump.center")
    spec = GridSpec((-L / 2, -L / 2), L / n, n, n)
    P = spec.points()
    dV = amp * np.exp(-((P[..., 0] - c[0]) ** 2 + (P[..., 1] - c[1]) ** 2) / (2 * wid**2))
    res = calderon_recover(dV, spec)
    return [
        write_grid_csv(os.path.join(out, "recovered.csv"), spec, res.recovered),
        write_json(os.path.join(out, "calderon.json"), {"relative_error": res.relative_error, "n": n}),
    ]


def _run_te_scan(cfg, out, strict):
    from .lsm import SCAN_REL_EPS, te_scan

    med = build_medium(cfg["medium"])
    spec = build_grid(cfg["grid"], med.domain)
    quad = build_quadrature(cfg.get("quadrature"))
    kr = _point(_need(cfg, "k_range"), "k_range")
    step = _number(cfg.get("step", 0.01), "step", 0, 0.02, strict_lo=True)
    probes = [_point(p, "probes") for p in _need(cfg, "probes")]
    res = te_scan(
        med,
        kr,
        step,
        probes,
        spec,
        quad,
        _number(cfg.get("eps_rel", SCAN_REL_EPS), "eps_rel", 0, strict_lo=True),
        _number(cfg.get("prominence_factor", 3.0), "prominence_factor", 0, strict_lo=True),
    )
    doc = {
        "detected": [{"k": k, "prominence": p} for k, p in zip(res.peaks, res.prominences)],
        "threshold": res.threshold,
        "curve": [[float(k), float(c)] for k, c in zip(res.ks, res.curve)],
    }
    return [write_json(os.path.join(out, "te_scan.json"), doc)]


def _run_invisibility(cfg, out, strict):
    from .herglotz import herglotz_fit
    from .directions import HerglotzDensity
    from .forward import ScatteringSolver
    from .probes import invisibility_defect, smallest_radial_root
    from .teig import radial_eigenpair

    med = build_medium(cfg["medium"])
    from .geometry import Disk

    if not isinstance(med.domain, Disk):
        raise ConfigError("invisibility runs on a disk medium")
    spec = build_grid(cfg["grid"], med.domain)
    quad = build_quadrature(cfg.get("quadrature"))
    R, V = med.domain.radius, med.contrast
    k = cfg.get("k", "auto")
    k = smallest_radial_root(0, R, V) if k == "auto" else _number(k, "k", 0, strict_lo=True)
    pair = radial_eigenpair(0, k, domain=med.domain, V=V, spec=spec)
    alphas = [float(a) for a in cfg.get("alphas", [1e-2, 1e-3, 1e-4, 1e-5, 1e-6])]
    S = ScatteringSolver(med, k, spec, **_solver_kw(cfg))
    rows = []
    for a in alphas:
        g, rep = herglotz_fit(pair.v, k, quad, a)
        d = invisibility_defect(med, k, g, spec, rep.relative_error, eigenvalues=[k], solver=S)
        rows.append({"alpha": a, "fit_error": rep.relative_error, "far_field_norm": d.far_field_norm, "normalised": d.normalised})
    doc = {"k": k, "rows": rows}
    if "control_k" in cfg:
        kc = _number(cfg["control_k"], "control_k", 0, strict_lo=True)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            d = invisibility_defect(med, kc, HerglotzDensity(quad, np.ones(quad.n)), spec, eigenvalues=[k])
        doc["control"] = {"k": kc, "far_field_norm": d.far_field_norm, "normalised": d.normalised}
    return [write_json(os.path.join(out, "invisibility.json"), doc)]


_RUNNERS = {
    "simulate": _run_simulate,
    "farfield": _run_farfield,
    "lsm": _run_lsm,
    "te-radial": _run_te_radial,
    "te-grid": _run_te_grid,
    "probe-corner": _run_probe_corner,
    "probe-surface": _run_probe_surface,
    "herglotz-fit": _run_herglotz_fit,
    "calderon-demo": _run_calderon,
    "te-scan": _run_te_scan,
    "invisibility": _run_invisibility,
}


def run(cfg, out, strict=False, experiment=None):
    """Validate ``cfg``, run it and write the manifest; returns the manifest dict."""
    import scipy

    cfg = validate(cfg, experiment)
    out = os.path.abspath(out)
    os.makedirs(out, exist_ok=True)
    t0 = time.perf_counter()
    files = _RUNNERS[cfg["experiment"]](cfg, out, strict)
    elapsed = time.perf_counter() - t0
    outputs = []
    for f in sorted(files):
        f = os.path.abspath(f)
        if os.path.commonpath([f, out]) != out:  # pragma: no cover - runners only join into out
            raise OSError(f"refusing to record a file outside the output directory: {f}")
        outputs.append({"path": os.path.relpath(f, out), "sha256": sha256_file(f), "bytes": os.path.getsize(f)})
    manifest = {
        "config": cfg,
        "strict": bool(strict),
        "versions": {"telab": __version__, "numpy": np.__version__, "scipy": scipy.__version__, "python": platform.python_version()},
        "outputs": outputs,
        "timings": {"run_seconds": elapsed},
    }
    write_json(os.path.join(out, "manifest.json"), manifest)
    return manifest


def _error(kind, exc, code):
    doc = {"error": kind, "type": type(exc).__name__, "message": str(exc), "exit_code": code}
    for attr in ("line", "offset"):
        if getattr(exc, attr, None) is not None:
            doc[attr] = getattr(exc, attr)
    print(json.dumps(doc), file=sys.stderr)
    return code


def main(argv=None):
    ap = argparse.ArgumentParser(prog="telab", description="Scattering and transmission-eigenvalue experiments.")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", help="output directory (overrides the config's 'output')")
    ap.add_argument("--strict", action="store_true", help="treat under-resolved grids as errors")
    ap.add_argument("--threads", type=int, default=None, help="cap BLAS/LAPACK threads")
    ap.add_argument("--seed", type=int, default=None, help="seed for optional noise (unsigned 64-bit)")
    args = ap.parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        return _error("io", exc, EXIT_IO)
    try:
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        if args.seed is not None:
            cfg["seed"] = args.seed
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        out = cfg.pop("output", None)
        out = args.out or out
        if not out:
            raise ConfigError("no output directory: pass --out or set 'output'")
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be positive")
    except (ConfigError, ParseError) as exc:
        return _error("config", exc, EXIT_CONFIG)
    try:
        from threadpoolctl import threadpool_limits

        with threadpool_limits(limits=args.threads):
            run(cfg, out, args.strict, args.experiment)
    except (ConfigError, ParseError) as exc:
        return _error("config", exc, EXIT_CONFIG)
    except SolverError as exc:
        return _error("solver", exc, EXIT_SOLVER)
    except OSError as exc:
        return _error("io", exc, EXIT_IO)
    except (TelabError, ValueError) as exc:
        return _error("config", exc, EXIT_CONFIG)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
