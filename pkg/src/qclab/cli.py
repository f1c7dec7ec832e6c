"""Batch command-line front end.

Every subcommand maps a flat set of typed parameters to a table (CSV) or a JSON
document.  Invalid configurations exit with status 2 and a JSON error on stderr;
numerical failures (infeasible parameters, divergence, ...) exit with status 3.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import beltrami, branches, burkholder, cantor, core_maps, spectra
from .errors import InvalidParameters, QCLabError

REQUIRED = object()


# ----------------------------------------------------------------- encoding


def fmt_real(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def fmt_complex(z: complex) -> str:
    z = complex(z)
    im = fmt_real(z.imag)
    if not im.startswith("-"):
        im = "+" + im
    return f"{fmt_real(z.real)}{im}i"


def parse_complex(s: str) -> complex:
    """Accept ``re+imi``, ``re+imj`` or a plain real."""
    t = str(s).strip().replace(" ", "")
    if t[-1:] in ("i", "j") and not t.endswith("nfi"):
        t = t[:-1] + "j"
    try:
        return complex(t)
    except ValueError:
        raise InvalidParameters(f"cannot parse complex value {s!r}") from None


def parse_real(s: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise InvalidParameters(f"cannot parse real value {s!r}") from None


def parse_int(s: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise InvalidParameters(f"cannot parse integer {s!r}") from None


def parse_range(s: str) -> list[float]:
    """``start:stop:step`` with the stop included; decimal arithmetic avoids drift."""
    parts = str(s).split(":")
    if len(parts) != 3:
        raise InvalidParameters(f"range must be start:stop:step, got {s!r}")
    try:
        a, b, h = (Decimal(p) for p in parts)
    except InvalidOperation:
        raise InvalidParameters(f"cannot parse range {s!r}") from None
    if h <= 0 or b < a:
        raise InvalidParameters(f"empty or ill-formed range {s!r}")
    n = int((b - a) / h)
    if n > 1_000_000:
        raise InvalidParameters("range too long")
    return [float(a + i * h) for i in range(n + 1)]


def parse_real_list(s: str) -> list[float]:
    return [parse_real(p) for p in str(s).split(",") if p.strip()]


def parse_complex_list(s: str) -> list[complex]:
    return [parse_complex(p) for p in str(s).split(",") if p.strip()]


def parse_bool(s) -> bool:
    if isinstance(s, bool):
        return s
    v = str(s).lower()
    if v in ("1", "true", "yes"):
        return True
    if v in ("0", "false", "no"):
        return False
    raise InvalidParameters(f"cannot parse boolean {s!r}")


PARSERS = {"real": parse_real, "int": parse_int, "complex": parse_complex, "string": str,
           "path": Path, "range": parse_range, "reals": parse_real_list,
           "complexes": parse_complex_list, "bool": parse_bool}


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else fmt_real(v)  # no NaN/inf in JSON
    if isinstance(v, (complex, np.complexfloating)):
        return fmt_complex(v)
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, Path):
        return str(v)
    return v


def _csv_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_real(v)
    if isinstance(v, (complex, np.complexfloating)):
        return fmt_complex(v)
    return str(v)


# ------------------------------------------------------------------ commands


@dataclass(frozen=True)
class Param:
    type: str
    default: Any = REQUIRED
    help: str = ""
    choices: tuple | None = None


@dataclass
class Table:
    rows: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Command:
    name: str
    help: str
    params: dict
    handler: Callable[[dict], Table]


COMMANDS: dict[str, Command] = {}


def command(name: str, help: str, **params: Param):
    def deco(fn):
        COMMANDS[name] = Command(name, help, params, fn)
        return fn
    return deco


def _need(p: dict, *keys):
    missing = [k for k in keys if p.get(k) is None]
    if missing:
        raise InvalidParameters(f"missing required parameter(s): {', '.join(missing)}")


PROV_JOINT = "F=(1+a)-sqrt((1-a)^2(K+1)^2+4Ka^2g^2)/(K-1)"
PROV_ROT_SRC = "2-(1/k-k)/(sqrt(1+g^-2)-k)"
PROV_ROT_IMG = "2-4K|g|/(K^2-1)"
PROV_BILIP = "2-2L|g|/(L^2-1)"
PROV_MOTION = "1+a-sqrt((1-a)^2+(1-l^2)a^2g^2)/l"


@command("spectrum", "closed-form multifractal spectra",
         kind=Param("string", "joint", "spectrum kind",
                    ("joint", "rotation-source", "rotation-image", "bilip", "motion")),
         K=Param("real", None, "distortion K (joint, rotation)"),
         L=Param("real", None, "bilipschitz constant (bilip)"),
         lam=Param("real", None, "|lambda| in (0,1) (motion)"),
         alpha=Param("real", None, "stretch exponent"),
         alpha_grid=Param("range", None, "alpha range start:stop:step"),
         gamma=Param("real", None, "rotation rate"),
         gamma_grid=Param("range", None, "gamma range start:stop:step"))
def _spectrum(p):
    kind = p["kind"]
    gammas = p["gamma_grid"] or ([p["gamma"]] if p["gamma"] is not None else None)
    if gammas is None:
        raise InvalidParameters("gamma or gamma-grid required")
    alphas = p["alpha_grid"] or ([p["alpha"]] if p["alpha"] is not None else None)
    rows = []
    if kind == "joint":
        _need(p, "K")
        if alphas is None:
            raise InvalidParameters("alpha or alpha-grid required")
        for a in alphas:
            for g in gammas:
                rows.append({"K": p["K"], "alpha": a, "gamma": g,
                             "value": spectra.joint_spectrum(p["K"], a, g), "provenance": PROV_JOINT})
    elif kind.startswith("rotation"):
        _need(p, "K")
        side = kind.split("-")[1]
        prov = PROV_ROT_SRC if side == "source" else PROV_ROT_IMG
        for g in gammas:
            rows.append({"K": p["K"], "gamma": g, "side": side,
                         "value": spectra.rotation_spectrum(p["K"], g, side), "provenance": prov})
    elif kind == "bilip":
        _need(p, "L")
        for g in gammas:
            rows.append({"L": p["L"], "gamma": g, "value": spectra.bilip_spectrum(p["L"], g),
                         "provenance": PROV_BILIP})
    else:
        _need(p, "lam")
        if alphas is None:
            raise InvalidParameters("alpha or alpha-grid required")
        for a in alphas:
            for g in gammas:
                rows.append({"lam_abs": p["lam"], "alpha": a, "gamma": g,
                             "value": spectra.motion_dim_bound(p["lam"], a, g),
                             "provenance": PROV_MOTION})
    return Table(rows)


BOUND_PROV = {"qc-gamma-max": "(K-1/K)/2", "bilip-gamma-max": "L-1/L",
              "qc-exp-threshold": "4K/(K^2-1)", "bilip-exp-threshold": "2L/(L^2-1)",
              "qc-alpha-range": "[1/K, K]", "factoring": "ceil(|g|/(L0-1/L0))",
              "minimal-distortion": "(1+|eta|)/(1-|eta|), eta=(tau-1)/(tau+1)"}


@command("bounds", "sharp pointwise and integrability bounds",
         kind=Param("string", REQUIRED, "bound kind", tuple(BOUND_PROV)),
         param=Param("real", None, "K, L or L0"),
         param_grid=Param("range", None, "parameter range"),
         gamma=Param("real", None, "rotation rate (factoring)"),
         tau=Param("complex", None, "exponent (minimal-distortion)"))
def _bounds(p):
    kind = p["kind"]
    rows = []
    if kind == "minimal-distortion":
        _need(p, "tau")
        rows.append({"kind": kind, "tau": p["tau"], "value": core_maps.minimal_distortion(p["tau"]),
                     "provenance": BOUND_PROV[kind]})
        return Table(rows)
    params = p["param_grid"] or ([p["param"]] if p["param"] is not None else None)
    if params is None:
        raise InvalidParameters("param or param-grid required")
    for P in params:
        if kind == "factoring":
            _need(p, "gamma")
            rows.append({"kind": kind, "param": P, "gamma": p["gamma"],
                         "value": spectra.factoring_lower_bound(p["gamma"], P),
                         "provenance": BOUND_PROV[kind]})
            continue
        v = spectra.sharp_bound(kind, P)
        row = {"kind": kind, "param": P}
        if isinstance(v, tuple):
            row.update(low=v[0], high=v[1])
        else:
            row["value"] = v
        row["provenance"] = BOUND_PROV[kind]
        rows.append(row)
    return Table(rows)


def _cantor_from(p) -> cantor.CantorMap:
    _need(p, "K", "alpha", "gamma", "r")
    return cantor.CantorMap(p["K"], p["alpha"], p["gamma"], p["r"], p["depth"])


@command("cantor", "nested-annuli extremal construction",
         K=Param("real"), alpha=Param("real"), gamma=Param("real"), r=Param("real"),
         depth=Param("int", 2, "tree depth"),
         boxcount=Param("bool", False, "per-level box counts"),
         tree=Param("bool", False, "include the node tree (centres, radii)"))
def _cantor(p):
    cm = _cantor_from(p)
    meta = {"K": cm.K, "alpha": cm.alpha, "gamma": cm.gamma, "r": cm.r, "depth": cm.depth,
            "t": cm.t, "alpha0": cm.cone.alpha0, "gamma0": cm.cone.gamma0, "tau0": cm.tau0,
            "s": cm.s, "N": cm.N, "smallness_ok": cm.smallness_ok,
            "dimension_limit": 2 * (1 - cm.t),
            "count_identity": math.log(cm.N) / math.log(1 / cm.r),
            "level_counts": [cm.node_count(j) for j in range(cm.depth + 1)],
            "provenance": "t: |(tau-1)/t+1-c|=a; s=r^t; N=floor(s/2r)^2"}
    if p["tree"]:
        meta["tree"] = [[{"center": c, "radius": R} for c, R in lvl] for lvl in cm.tree]
    rows = []
    if p["boxcount"]:
        for lc in cantor.level_box_counts(cm):
            rows.append({"level": lc.level, "scale": lc.scale, "count": lc.count,
                         "log_ratio": lc.log_ratio, "provenance": "log N^j/log r^-j"})
    return Table(rows, meta)


def _read_points(path: Path) -> np.ndarray:
    pts = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or not rec[0].strip():
                continue
            try:
                pts.append(complex(float(rec[0]), float(rec[1])) if len(rec) >= 2
                           else parse_complex(rec[0]))
            except (ValueError, InvalidParameters):
                if pts:
                    raise InvalidParameters(f"bad point record {rec!r}") from None
                continue  # header line
    if not pts:
        raise InvalidParameters(f"no points in {path}")
    return np.array(pts)


@command("boxcount", "box-counting dimension of a point set",
         points=Param("path", None, "CSV of points (re,im or re+imi)"),
         K=Param("real", None), alpha=Param("real", None), gamma=Param("real", None),
         r=Param("real", None), depth=Param("int", 2), level=Param("int", None),
         scales=Param("reals", REQUIRED, "comma-separated cell sides"),
         offset=Param("complex", 0j, "grid anchor shift in cell units"))
def _boxcount(p):
    if p["points"] is not None:
        pts = _read_points(p["points"])
        src = str(p["points"])
    else:
        cm = _cantor_from(p)
        level = cm.depth if p["level"] is None else p["level"]
        pts = cantor.cantor_set_points(cm, level)
        src = f"cantor level {level}"
    bc = cantor.box_counting_dimension(pts, p["scales"], p["offset"])
    rows = [{"scale": h, "count": c, "log_ratio": lr, "provenance": "occupied cells"}
            for h, c, lr in bc.per_scale]
    return Table(rows, {"source": src, "points": int(pts.size), "fit": bc.fit,
                        "provenance": "least-squares slope of log count vs log 1/scale"})


@command("burkholder", "complex Burkholder functional of a power map",
         profile=Param("string", "extremal", "map", ("extremal", "identity", "power")),
         K=Param("real", None, "distortion (extremal)"),
         tau=Param("complex", None, "exponent (power)"),
         p=Param("complex", REQUIRED), beta=Param("complex", None, "default: tangency solution"),
         method=Param("string", "quad", "integration", ("quad", "closed")))
def _burkholder(p):
    P = p["p"]
    if p["profile"] == "extremal":
        _need(p, "K")
        prof = burkholder.PowerMapProfile.extremal(P, spectra.ellipticity(p["K"]))
    elif p["profile"] == "identity":
        prof = burkholder.PowerMapProfile.identity()
    else:
        _need(p, "tau")
        prof = burkholder.PowerMapProfile(p["tau"])
    beta = burkholder.solve_beta(P) if p["beta"] is None else p["beta"]
    val = burkholder.burkholder_integral(prof, P, beta, method=p["method"])
    rho = burkholder.solve_rho(P, prof.k)
    return Table([{"profile": p["profile"], "tau": prof.tau, "k": prof.k, "p": P, "beta": beta,
                   "rho": rho, "integral": val, "method": p["method"],
                   "provenance": "(1/pi)int(||fz|+rho|fzb||-|p||fzb|)|(fz+rho|mu|fz)^(beta-1)|"}])


@command("powint", "average of |f_z^beta| for a power map",
         tau=Param("complex"), beta=Param("complex"),
         radius=Param("real", 1.0, "disk radius (centred at 0)"))
def _powint(p):
    prof = burkholder.PowerMapProfile(p["tau"])
    avg = burkholder.complex_power_integral(prof, p["beta"], (0j, p["radius"]))
    closed = burkholder.power_average_closed_form(p["tau"], p["beta"], p["radius"])
    return Table([{"tau": p["tau"], "beta": p["beta"], "radius": p["radius"],
                   "exponent": avg.exponent, "average": avg.value, "closed_form": closed,
                   "divergent": "divergent" if avg.divergent else "finite",
                   "provenance": "exponent=Re(beta(tau-1))+2"}])


@command("interp", "interpolation-lemma check on an analytic family",
         family=Param("string", "radial", "family", ("constant", "radial", "spiral")),
         k=Param("real", 1 / 3, "ellipticity"), p=Param("complex", 3 + 0j, "radial family exponent"),
         p0=Param("real", 2.0), lam=Param("complex", REQUIRED),
         betas=Param("complexes", None, "comma-separated exponents"),
         sample=Param("int", 0, "number of random exponents"),
         where=Param("string", "inside", "sampling region", ("inside", "beyond-axis")),
         seed=Param("int", 0), tol=Param("real", 1e-6))
def _interp(p):
    if p["family"] == "constant":
        fam = burkholder.ConstantFamily()
    elif p["family"] == "radial":
        fam = burkholder.PowerFlowFamily.extremal(p["p"], p["k"])
    else:
        fam = burkholder.PowerFlowFamily.spiral(p["k"])
    betas = list(p["betas"] or [])
    if p["sample"]:
        betas += burkholder.sample_lemma_betas(p["p0"], abs(p["lam"]), p["sample"], p["where"], p["seed"])
    if not betas:
        raise InvalidParameters("betas or sample required")
    recs = burkholder.verify_interpolation(fam, p["p0"], p["lam"], betas, tol=p["tol"])
    rows = [{"beta": r.beta, "integral": r.integral, "inside": r.inside, "passed": r.passed,
             "provenance": "|b|+|b-p0|<=p0/|lam| => int|Phi^b|<=1"} for r in recs]
    return Table(rows, {"violations": sum(not r.passed for r in recs)})


def _mu_from(p, grid):
    if p["mu"] == "radial":
        _need(p, "tau")
        return beltrami.mu_power(grid, p["tau"]), lambda: beltrami.power_map_exact(grid, p["tau"])
    if p["mu"] == "constant":
        _need(p, "k")
        return (beltrami.mu_constant(grid, p["k"]),
                lambda: beltrami.constant_map_exact(grid.coords(), p["k"]))
    raise InvalidParameters(f"unknown coefficient {p['mu']!r}")


SOLVE_PARAMS = dict(
    mu=Param("string", REQUIRED, "coefficient", ("radial", "constant")),
    tau=Param("complex", None, "power-map exponent (radial)"),
    k=Param("complex", None, "constant value on D (constant)"),
    grid=Param("int", 1024, "nodes per side (power of two)"),
    half_width=Param("real", 2.0, "box [-w, w)^2"),
    tol=Param("real", 1e-10), mode=Param("string", "free", "transform", ("free", "periodic")),
    grid_out=Param("path", None, "QCGRID1 file for f"),
    fz_out=Param("path", None, "QCGRID1 file for f_z"))


def _solve_report(p, res, exact):
    g = res.f
    F = g.coords() + g.data
    ex = exact()
    mask = res.interior_mask()
    err = float(np.linalg.norm((F - ex)[mask]) / np.linalg.norm(ex[mask]))
    if p["grid_out"] is not None:
        g.like(F).write(p["grid_out"])
    if p["fz_out"] is not None:
        res.fz.write(p["fz_out"])
    return Table([{"n": g.nx, "lambda": res.lam, "series_terms": res.series_terms,
                   "residual": res.residual, "tol": res.tol, "aliasing": res.aliasing,
                   "rel_l2_error": err,
                   "provenance": "omega=mu(S omega+1); f=z+C omega; fz=1+S omega"}])


@command("solve", "principal solution on a grid", **SOLVE_PARAMS)
def _solve(p):
    grid = beltrami.ComplexGrid.square(p["grid"], p["half_width"])
    mu, exact = _mu_from(p, grid)
    res = beltrami.solve_principal(mu, p["tol"], p["mode"])
    return _solve_report(p, res, exact)


@command("flow", "holomorphic flow member lambda mu/||mu||", lam=Param("complex"), **SOLVE_PARAMS)
def _flow(p):
    grid = beltrami.ComplexGrid.square(p["grid"], p["half_width"])
    mu, _ = _mu_from(p, grid)
    res = beltrami.solve_flow(mu, p["lam"], p["tol"], p["mode"])
    k = float(np.max(np.abs(mu.data)))
    # the closed forms apply only at lambda = ||mu||
    scaled = dict(p)
    if p["mu"] == "radial" and k > 0:
        eta = p["lam"] * ((p["tau"] - 1) / (p["tau"] + 1)) / k
        scaled["tau"] = (1 + eta) / (1 - eta)
        exact = lambda: beltrami.power_map_exact(grid, scaled["tau"])
    else:
        kk = p["lam"] * p["k"] / k if k > 0 else 0
        exact = lambda: beltrami.constant_map_exact(grid.coords(), kk)
    return _solve_report(p, res, exact)


MAP_PARAMS = dict(
    map=Param("string", REQUIRED, "map", ("identity", "spiral", "power", "cantor")),
    gamma=Param("real", None, "spiral rate / cantor gamma"),
    tau=Param("complex", None, "power exponent"),
    variant=Param("string", "global-power", "power-map variant",
                  ("global-power", "disk-localized")),
    K=Param("real", None), alpha=Param("real", None), r=Param("real", None),
    depth=Param("int", 2))


def _map_from(p):
    m = p["map"]
    if m == "identity":
        return lambda z: np.asarray(z, dtype=complex)
    if m == "spiral":
        _need(p, "gamma")
        return core_maps.ModelMapParams.spiral(p["gamma"])
    if m == "power":
        _need(p, "tau")
        return core_maps.ModelMapParams(p["tau"], p["variant"])
    return _cantor_from(p)


@command("branch", "continuous log of difference quotients along a path",
         w=Param("complex", 0j, "basepoint"), path=Param("complexes", REQUIRED, "polyline"),
         seed=Param("string", "principal", "'principal' or a complex log value"), **MAP_PARAMS)
def _branch(p):
    f = _map_from(p)
    seed = p["seed"] if p["seed"] == "principal" else parse_complex(p["seed"])
    tr = branches.track_branch(f, p["w"], p["path"], seed)
    rows = [{"index": i, "z": z, "logval": lv, "provenance": "log((f(z)-f(w))/(z-w))"}
            for i, (z, lv) in enumerate(zip(tr.z.tolist(), tr.logval.tolist()))]
    return Table(rows, {"refinement_depth": tr.refinement_depth, "turns": tr.total_turns()})


@command("exponents", "stretch and rotation quotients at a point",
         z=Param("complex", 0j), radii=Param("reals", REQUIRED, "comma-separated radii"),
         anchor=Param("real", 1.0, "path start offset"), **MAP_PARAMS)
def _exponents(p):
    f = _map_from(p)
    est = branches.estimate_exponents(f, p["z"], p["radii"], anchor=p["anchor"])
    rows = [{"radius": e.radius, "alpha_r": e.alpha_r, "gamma_r": e.gamma_r, "logval": e.logval,
             "provenance": "alpha=log|df|/log r; gamma=arg df/log|df|"} for e in est]
    return Table(rows)


@command("compare-logs", "analytic versus geometric log f_z",
         mu=Param("string", REQUIRED, "coefficient", ("radial", "constant")),
         tau=Param("complex", None), k=Param("complex", None), z=Param("complex", REQUIRED),
         grid=Param("int", 512), half_width=Param("real", 2.0),
         nlam=Param("int", 9, "lambda samples on [0, ||mu||]"))
def _compare(p):
    grid = beltrami.ComplexGrid.square(p["grid"], p["half_width"])
    mu, _ = _mu_from(p, grid)
    k = float(np.max(np.abs(mu.data)))
    lams = np.linspace(0, k, max(p["nlam"], 2))
    c = beltrami.compare_log_branches(mu, p["z"], lams)
    return Table([{"z": c.z, "analytic_log": c.analytic_log, "geometric_log": c.geometric_log,
                   "difference": c.difference, "abs_difference": abs(c.difference),
                   "provenance": "lambda-continuation vs lim log((f(z+t)-f(z))/t)-Log(1+mu)"}])


# ----------------------------------------------------------------------- run


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output: Path | None = None
    format: str = "csv"


def _validate(cfg: RunConfig) -> dict:
    if cfg.command not in COMMANDS:
        raise InvalidParameters(f"unknown command {cfg.command!r}")
    if cfg.format not in ("csv", "json"):
        raise InvalidParameters(f"format must be csv or json, got {cfg.format!r}")
    spec = COMMANDS[cfg.command].params
    unknown = sorted(set(cfg.parameters) - set(spec))
    if unknown:
        raise InvalidParameters(f"unknown parameter(s) for {cfg.command}: {', '.join(unknown)}")
    out = {}
    for key, prm in spec.items():
        if key in cfg.parameters and cfg.parameters[key] is not None:
            v = cfg.parameters[key]
            if isinstance(v, str) or prm.type in ("bool",):
                v = PARSERS[prm.type](v)
            if prm.choices and v not in prm.choices:
                raise InvalidParameters(f"{key} must be one of {prm.choices}, got {v!r}")
            out[key] = v
        elif prm.default is REQUIRED:
            raise InvalidParameters(f"missing required parameter {key!r}")
        else:
            out[key] = prm.default
    return out


def render(table: Table, cfg: RunConfig, params: dict | None = None) -> str:
    if cfg.format == "json":
        shown = cfg.parameters if params is None else params
        doc = {"command": cfg.command,
               "parameters": {k: _json_value(v) for k, v in sorted(shown.items())
                              if v is not None},
               **{k: _json_value(v) for k, v in table.meta.items()},
               "rows": _json_value(table.rows)}
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    rows = table.rows or [{k: v for k, v in table.meta.items() if not isinstance(v, (list, dict))}]
    header = []
    for r in rows:
        header += [k for k in r if k not in header]
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_csv_value(r[k]) if k in r else "" for k in header])
    return buf.getvalue()


def _error(code: str, message: str, status: int) -> int:
    sys.stderr.write(json.dumps({"error": code, "message": message, "exit": status}) + "\n")
    return status


def run(cfg: RunConfig) -> int:
    """Execute ``cfg``; returns the exit status (0 ok, 2 invalid config, 3 numerical failure)."""
    try:
        params = _validate(cfg)
        table = COMMANDS[cfg.command].handler(params)
        text = render(table, cfg, params)
    except InvalidParameters as exc:
        return _error(exc.code, str(exc), 2)
    except QCLabError as exc:
        return _error(exc.code, str(exc), 3)
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        Path(cfg.output).write_text(text, encoding="utf-8", newline="")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SystemExit(_error("invalid-config", message, 2))


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qclab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd in COMMANDS.values():
        sp = sub.add_parser(cmd.name, help=cmd.help)
        sp.add_argument("--output", "-o", type=Path, default=None)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        for key, prm in cmd.params.items():
            flag = "--" + key.replace("_", "-")
            extra = f" (choices: {', '.join(prm.choices)})" if prm.choices else ""
            if prm.type == "bool":
                sp.add_argument(flag, dest=key, action="store_true", default=None,
                                help=prm.help)
            else:
                sp.add_argument(flag, dest=key, default=None, help=prm.help + extra)
    return ap


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    cmd = args.pop("command")
    output, fmt = args.pop("output"), args.pop("format")
    params = {k: v for k, v in args.items() if v is not None}
    return run(RunConfig(cmd, params, output, fmt))


if __name__ == "__main__":
    sys.exit(main())
