"""Declarative experiment driver: configs in, CSV and plot series out.

Each experiment runs a mesh/solve/error pipeline over a parameter series and
writes one CSV row per solve (schema in :mod:`pwvem.postproc`) plus raw
(x, y) plot files.  Everything is deterministic for a fixed config; the CSV
is byte-identical across re-runs apart from its timestamp header line.

Available experiments
---------------------
table1     triangular h-refinement comparing PUM, GRAD and PW-VEM
voronoi_h  h-refinement on the Voronoi family
pconv      p-refinement at fixed mesh
pollution  fixed h*k = 3 series (k derived from each mesh)
singular   p-refinement for Bessel fields of limited regularity
patch      plane-wave reproduction check
infsup     local inf-sup constant on random convex cells
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .element import infsup_reference, local_infsup_beta
from .mesh import PolygonalMesh, make_structured_triangular, make_voronoi, read_mesh
from .postproc import (
    ErrorReport,
    ExactSolution,
    bessel_singular_solution,
    csv_row,
    hankel_solution,
    impedance_datum,
    l2_relative_error,
    plane_wave_combination,
    plane_wave_solution,
    rate_table,
    write_csv,
    write_xy,
)
from .pwcore import WaveContext, equispaced_directions
from .system import assemble, assemble_rhs, solve

EXPERIMENTS = ("table1", "voronoi_h", "pconv", "pollution", "singular",
               "patch", "infsup")

_DEFAULTS = {
    "table1": dict(k=20.0, p=(13,), mesh="tri:2,tri:4,tri:8,tri:16",
                   variants=("PUM", "GRAD", "PWVEM")),
    "voronoi_h": dict(k=20.0, p=(13,),
                      mesh="voronoi:8,voronoi:16,voronoi:32,voronoi:64,"
                           "voronoi:128,voronoi:256,voronoi:512",
                      variants=("PWVEM",)),
    "pconv": dict(k=20.0, p=(3, 5, 7, 9, 11, 13), mesh="tri:4",
                  variants=("PWVEM",)),
    "pollution": dict(k=None, p=(9,),
                      mesh="voronoi:8,voronoi:16,voronoi:32,voronoi:64,"
                           "voronoi:128,voronoi:256,voronoi:512",
                      variants=("PWVEM",)),
    "singular": dict(k=10.0, p=(3, 5, 7, 9, 11, 13), mesh="tri:4",
                     variants=("PWVEM",)),
    "patch": dict(k=20.0, p=(13,), mesh="tri:4,voronoi:16",
                  variants=("PWVEM",)),
    "infsup": dict(k=20.0, p=(13,), mesh="", variants=("PWVEM",)),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved parameters of one experiment run."""

    experiment: str
    k: float | None = None
    p: tuple[int, ...] = ()
    mesh: str = ""
    variants: tuple[str, ...] = ()
    exact: str = "hankel"
    out: str = "out"
    offset_angle: float = 0.0
    seed: int = 1
    lloyd_iters: int = 10
    xi: tuple[float, ...] = (1.0, 1.5, 2.0 / 3.0)
    n_cells_infsup: int = 20

    def validated(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        cfg = self
        defaults = _DEFAULTS[self.experiment]
        if not cfg.p:
            cfg = replace(cfg, p=tuple(defaults["p"]))
        if not cfg.mesh:
            cfg = replace(cfg, mesh=defaults["mesh"])
        if not cfg.variants:
            cfg = replace(cfg, variants=tuple(defaults["variants"]))
        if cfg.k is None and defaults["k"] is not None:
            cfg = replace(cfg, k=defaults["k"])
        for p in cfg.p:
            if p < 3 or p % 2 == 0:
                raise ValueError(f"p = {p} invalid: need p = 2m+1 >= 3")
        for xi in cfg.xi:
            if not 0.0 < xi <= 5.0:
                raise ValueError(f"xi = {xi} outside (0, 5]")
        for v in cfg.variants:
            if v not in ("PWVEM", "PUM", "GRAD"):
                raise ValueError(f"unknown variant {v!r}")
        return cfg


def parse_config_file(path) -> dict:
    """Read `key = value` lines; '#' starts a comment."""
    values: dict[str, str] = {}
    known = {"experiment", "k", "p", "mesh", "variant", "out", "offset",
             "seed", "lloyd", "xi"}
    with open(path, "r", encoding="utf-8") as f:
        for ln, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in known:
                raise ValueError(f"{path}:{ln}: unknown key {key!r}")
            values[key] = val
    return values


def _parse_fraction(s: str) -> float:
    if "/" in s:
        a, b = s.split("/", 1)
        return float(a) / float(b)
    return float(s)


def config_from_values(values: dict) -> ExperimentConfig:
    """Build a config from string-valued keys (file or CLI layer)."""
    if "experiment" not in values:
        raise ValueError("missing required key 'experiment'")
    kwargs: dict = {"experiment": values["experiment"]}
    if "k" in values:
        kwargs["k"] = float(values["k"])
    if "p" in values:
        kwargs["p"] = tuple(int(s) for s in str(values["p"]).split(","))
    if "mesh" in values:
        kwargs["mesh"] = values["mesh"]
    if "variant" in values:
        kwargs["variants"] = tuple(
            s.strip().upper() for s in str(values["variant"]).split(","))
    if "out" in values:
        kwargs["out"] = values["out"]
    if "offset" in values:
        kwargs["offset_angle"] = float(values["offset"])
    if "seed" in values:
        kwargs["seed"] = int(values["seed"])
    if "lloyd" in values:
        kwargs["lloyd_iters"] = int(values["lloyd"])
    if "xi" in values:
        kwargs["xi"] = tuple(
            _parse_fraction(s) for s in str(values["xi"]).split(","))
    return ExperimentConfig(**kwargs).validated()


def build_mesh(spec: str, seed: int, lloyd_iters: int) -> PolygonalMesh:
    """Build one mesh from a spec entry.

    ``tri:<n>`` structured triangles, ``voronoi:<cells>`` Voronoi mesh
    (seed and Lloyd sweeps from the config); anything else is a mesh file
    path.
    """
    spec = spec.strip()
    if spec.startswith("tri:"):
        return make_structured_triangular(int(spec[4:]))
    if spec.startswith("voronoi:"):
        return make_voronoi(int(spec[8:]), seed=seed, lloyd_iters=lloyd_iters)
    return read_mesh(spec)


def _exact_field(kind: str, k: float, ctx: WaveContext,
                 xi: float | None = None) -> ExactSolution:
    if kind == "hankel":
        return hankel_solution(k)
    if kind == "bessel":
        return bessel_singular_solution(k, xi if xi is not None else 1.0)
    if kind == "plane_wave":
        return plane_wave_solution(k, ctx.directions.vectors[0])
    raise ValueError(f"unknown exact-solution kind {kind!r}")


def _solve_once(mesh: PolygonalMesh, ctx: WaveContext, variant: str,
                exact: ExactSolution, evaluation: str) -> ErrorReport:
    system = assemble(mesh, ctx, variant)
    rhs = assemble_rhs(system, impedance_datum(exact, ctx.k))
    sol = solve(system, rhs)
    return l2_relative_error(sol, exact, evaluation=evaluation)


def random_convex_cell(rng: np.random.Generator, n_vertices: int,
                       diameter: float) -> np.ndarray:
    """A random convex polygon with the requested diameter.

    Vertices are placed on a randomly squeezed and rotated circle at sorted
    angles (minimum separation enforced), then rescaled exactly.
    """
    while True:
        ang = np.sort(rng.uniform(0.0, 2.0 * np.pi, n_vertices))
        gaps = np.diff(np.append(ang, ang[0] + 2.0 * np.pi))
        if gaps.min() > 0.25 and gaps.max() < 0.8 * np.pi:
            break
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    squeeze = rng.uniform(0.6, 1.0)
    rot = rng.uniform(0.0, np.pi)
    c, s = np.cos(rot), np.sin(rot)
    pts = pts @ np.array([[1.0, 0.0], [0.0, squeeze]]) @ np.array([[c, -s], [s, c]])
    span = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)).max()
    return pts * (diameter / span)


def run(config: ExperimentConfig) -> list[str]:
    """Execute an experiment; returns the CSV rows it wrote."""
    cfg = config.validated()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _echo_config(cfg, out / "config_resolved.txt")
    rows = _RUNNERS[cfg.experiment](cfg, out)
    if rows:
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        write_csv(out / f"{cfg.experiment}.csv", rows, timestamp=stamp)
    return rows


def _echo_config(cfg: ExperimentConfig, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"experiment = {cfg.experiment}\n")
        f.write(f"k = {cfg.k}\n")
        f.write(f"p = {','.join(str(p) for p in cfg.p)}\n")
        f.write(f"mesh = {cfg.mesh}\n")
        f.write(f"variant = {','.join(cfg.variants)}\n")
        f.write(f"out = {cfg.out}\n")
        f.write(f"offset = {cfg.offset_angle}\n")
        f.write(f"seed = {cfg.seed}\n")
        f.write(f"lloyd = {cfg.lloyd_iters}\n")
        f.write(f"xi = {','.join(f'{x:.12g}' for x in cfg.xi)}\n")


def _meshes(cfg: ExperimentConfig):
    for spec in cfg.mesh.split(","):
        spec = spec.strip()
        if spec:
            yield spec, build_mesh(spec, cfg.seed, cfg.lloyd_iters)


def _run_table1(cfg: ExperimentConfig, out: Path) -> list[str]:
    rows = []
    p = cfg.p[0]
    ctx = WaveContext(cfg.k, equispaced_directions(p, cfg.offset_angle))
    exact = _exact_field(cfg.exact, cfg.k, ctx)
    for variant in cfg.variants:
        reports, hs, errs = [], [], []
        for spec, mesh in _meshes(cfg):
            rep = _solve_once(mesh, ctx, variant, exact, evaluation="exact")
            reports.append((spec, rep))
            hs.append(rep.h)
            errs.append(rep.l2_rel_error)
        rate_table([r for _, r in reports])
        rows += [csv_row("table1", r, cfg.offset_angle, spec)
                 for spec, r in reports]
        write_xy(out / f"table1_{variant.lower()}.xy", hs, errs)
    return rows


def _run_voronoi_h(cfg: ExperimentConfig, out: Path) -> list[str]:
    rows = []
    p = cfg.p[0]
    ctx = WaveContext(cfg.k, equispaced_directions(p, cfg.offset_angle))
    exact = _exact_field(cfg.exact, cfg.k, ctx)
    for variant in cfg.variants:
        reports = []
        for spec, mesh in _meshes(cfg):
            rep = _solve_once(mesh, ctx, variant, exact, evaluation="projection")
            reports.append((spec, rep))
        try:
            rate_table([r for _, r in reports])
        except ValueError:
            pass  # family not strictly h-decreasing (possible without Lloyd)
        rows += [csv_row("voronoi_h", r, cfg.offset_angle, spec)
                 for spec, r in reports]
        write_xy(out / f"voronoi_h_{variant.lower()}.xy",
                 [1.0 / r.h for _, r in reports],
                 [r.l2_rel_error for _, r in reports])
    return rows


def _run_pconv(cfg: ExperimentConfig, out: Path) -> list[str]:
    rows = []
    specs = list(_meshes(cfg))
    for variant in cfg.variants:
        for spec, mesh in specs:
            errs = []
            for p in cfg.p:
                ctx = WaveContext(cfg.k, equispaced_directions(p, cfg.offset_angle))
                exact = _exact_field(cfg.exact, cfg.k, ctx)
                evaluation = "projection" if variant == "PWVEM" else "exact"
                rep = _solve_once(mesh, ctx, variant, exact, evaluation)
                errs.append(rep.l2_rel_error)
                rows.append(csv_row("pconv", rep, cfg.offset_angle, spec))
            write_xy(out / f"pconv_{variant.lower()}.xy", list(cfg.p), errs)
    return rows


def _run_pollution(cfg: ExperimentConfig, out: Path) -> list[str]:
    rows = []
    p = cfg.p[0]
    inv_h, errs = [], []
    for spec, mesh in _meshes(cfg):
        k = 3.0 / mesh.h  # enforce h*k = 3 on every mesh of the series
        ctx = WaveContext(k, equispaced_directions(p, cfg.offset_angle))
        exact = _exact_field(cfg.exact, k, ctx)
        rep = _solve_once(mesh, ctx, "PWVEM", exact, evaluation="projection")
        rows.append(csv_row("pollution", rep, cfg.offset_angle, spec))
        inv_h.append(1.0 / rep.h)
        errs.append(rep.l2_rel_error)
    write_xy(out / "pollution_pwvem.xy", inv_h, errs)
    return rows


def _run_singular(cfg: ExperimentConfig, out: Path) -> list[str]:
    rows = []
    specs = list(_meshes(cfg))
    for variant in cfg.variants:
        for xi in cfg.xi:
            for spec, mesh in specs:
                errs = []
                for p in cfg.p:
                    ctx = WaveContext(cfg.k,
                                      equispaced_directions(p, cfg.offset_angle))
                    exact = bessel_singular_solution(cfg.k, xi)
                    evaluation = "projection" if variant == "PWVEM" else "exact"
                    rep = _solve_once(mesh, ctx, variant, exact, evaluation)
                    errs.append(rep.l2_rel_error)
                    rows.append(csv_row(f"singular_xi={xi:.6g}", rep,
                                        cfg.offset_angle, spec))
                write_xy(out / f"singular_{variant.lower()}_xi{xi:.4g}.xy",
                         list(cfg.p), errs)
    return rows


def _run_patch(cfg: ExperimentConfig, out: Path) -> list[str]:
    rows = []
    p = cfg.p[0]
    ctx = WaveContext(cfg.k, equispaced_directions(p, cfg.offset_angle))
    rng = np.random.default_rng(cfg.seed)
    combos = [
        ("pw1", plane_wave_solution(cfg.k, ctx.directions.vectors[0])),
        ("combo", plane_wave_combination(
            ctx, rng.normal(size=p) + 1j * rng.normal(size=p))),
    ]
    for spec, mesh in _meshes(cfg):
        for label, exact in combos:
            rep = _solve_once(mesh, ctx, "PWVEM", exact, evaluation="projection")
            rows.append(csv_row(f"patch_{label}", rep, cfg.offset_angle, spec))
    return rows


def _run_infsup(cfg: ExperimentConfig, out: Path) -> list[str]:
    p = cfg.p[0]
    ctx = WaveContext(cfg.k, equispaced_directions(p, cfg.offset_angle))
    rng = np.random.default_rng(cfg.seed)
    hks, betas, refs = [], [], []
    for _ in range(cfg.n_cells_infsup):
        hk = rng.uniform(0.1, 1.0)
        cell = random_convex_cell(rng, int(rng.integers(4, 9)), hk / cfg.k)
        beta = local_infsup_beta(cell, ctx)
        hks.append(hk)
        betas.append(beta)
        refs.append(infsup_reference(hk))
    order = np.argsort(hks)
    write_xy(out / "infsup_beta.xy", np.asarray(hks)[order],
             np.asarray(betas)[order])
    write_xy(out / "infsup_reference.xy", np.asarray(hks)[order],
             np.asarray(refs)[order])
    with open(out / "infsup.csv", "w", encoding="ascii") as f:
        f.write("cell,k,p,hk,beta,beta_reference,above_reference\n")
        for i in range(cfg.n_cells_infsup):
            f.write(f"{i},{cfg.k:.10g},{p},{hks[i]:.6e},{betas[i]:.6e},"
                    f"{refs[i]:.6e},{int(betas[i] >= refs[i])}\n")
    return []


_RUNNERS = {
    "table1": _run_table1,
    "voronoi_h": _run_voronoi_h,
    "pconv": _run_pconv,
    "pollution": _run_pollution,
    "singular": _run_singular,
    "patch": _run_patch,
    "infsup": _run_infsup,
}
