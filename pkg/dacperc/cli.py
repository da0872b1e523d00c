#!/usr/bin/env python3
"""
dacperc CLI - Divide-and-Colour percolation experiments on the triangular lattice
Entry points for pip console_scripts
"""
import os
import sys
import functools
from typing import Any, Dict, Optional

import click
from dotenv import load_dotenv

# Load environment first
load_dotenv()

from dacperc.analysis.crossings import CrossingSpec
from dacperc.config import (
    DEFAULT_OUTPUT_DIR,
    DEFAULT_THREADS,
    LEMMA_GRAPHS,
    LEMMA_P_GRID,
    LEMMA_R_GRID,
    LOG_DIR,
    RunConfig,
    build_run_config,
    load_config_file,
    psi_hat_from_summary,
)
from dacperc.config import config as defaults
from dacperc.controller import (
    SamplerSettings,
    buffer_sensitivity,
    cluster_tail,
    crossing_prob,
    cutpoint_growth,
    duality_audit,
    dump_samples,
    exact_tables,
    finite_size_check,
    fk_range_tail,
    lemma_suite,
    open_outputs,
    rc_locator,
    russo_suite,
    theta_curve,
    uniqueness_probe,
    write_plot,
    write_summary,
)
from dacperc.core.errors import ConfigError, DacpercError
from dacperc.core.lattice import Parallelogram
from dacperc.core.managers.run_logger import RunLogger
from dacperc.models.rcm.params import RcmParams


def handle_errors(fn):
    """Turn library errors into a message on stderr and the error's exit code."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DacpercError as e:
            click.echo(f"❌ Error: {e}", err=True)
            sys.exit(e.exit_code)
    return wrapper


def _remember(ctx: click.Context, param: click.Parameter, value):
    ctx.meta[f"dacperc.{param.name}"] = value
    return value


def sampler_options(fn):
    for option in reversed([
        click.option('--beta', type=float, help='Inverse temperature (>= 0)'),
        click.option('--samples', type=int, help='Total number of retained samples'),
        click.option('--chains', type=int, help='Independent Swendsen-Wang chains'),
        click.option('--burn-in', 'burn_in', type=int, help='Sweeps discarded before sampling'),
        click.option('--thin', type=int, help='Sweeps between retained samples'),
        click.option('--buffer', type=int, help='Buffer width around the measurement window'),
        click.option('--seed', type=int, help='Master seed'),
        click.option('--psi-hat', type=float, expose_value=False, callback=_remember,
                     help='FK-range decay rate; default buffer is max(ceil(2 / psi-hat), 16)'),
        click.option('--psi-from', type=click.Path(exists=True, dir_okay=False), expose_value=False,
                     callback=_remember, help='Take psi-hat from a fit fk-range summary.json'),
    ]):
        fn = option(fn)
    return fn


def region_literal(kind: str, value: str) -> str:
    """--region square 32 | tall 16 | rect 16,48 | literal S0,4,0,8"""
    try:
        if kind == "square":
            n = int(value)
            return Parallelogram.s(n, n).literal()
        if kind == "tall":
            n = int(value)
            return Parallelogram.s(n, 3 * n).literal()
        if kind == "rect":
            n, m = (int(x) for x in value.split(","))
            return Parallelogram.s(n, m).literal()
        if kind == "literal":
            return Parallelogram.parse(value).literal()
    except ValueError as e:
        raise ConfigError(f"region: {e}") from e
    raise ConfigError(f"region kind must be square, tall, rect or literal, got {kind!r}")


def resolve(ctx: click.Context, command: str, **flags) -> RunConfig:
    obj = ctx.obj or {}
    file_values = load_config_file(obj["config"], command) if obj.get("config") else None
    if obj.get("output_dir"):
        flags["output_dir"] = obj["output_dir"]
    psi_hat = ctx.meta.get("dacperc.psi_hat")
    psi_from = ctx.meta.get("dacperc.psi_from")
    if psi_hat is None and psi_from:
        psi_hat = psi_hat_from_summary(psi_from)
    if psi_hat is not None:
        flags["psi_hat"] = psi_hat
    cfg = build_run_config(command, file_values, flags)
    click.echo(f"⚙️  {command} [{cfg.fingerprint()}]")
    return cfg


def settings_for(ctx: click.Context, cfg: RunConfig) -> SamplerSettings:
    return SamplerSettings.from_run_config(cfg, (ctx.obj or {}).get("threads"))


def require(cfg: RunConfig, *names: str):
    missing = [name.replace("_", "-") for name in names if getattr(cfg, name) in (None, [], ())]
    if missing:
        raise ConfigError(f"missing required setting(s): {', '.join(missing)}")


def warn_thin(*ensembles):
    if any(e.thin_warning for e in ensembles):
        click.echo("⚠️  thin is below the integrated autocorrelation time of the edge density")


def finish(out, summary_path: str):
    manifest = out.finalize()
    click.echo(f"💾 Summary: {summary_path}")
    click.echo(f"💾 Manifest: {manifest}")


def estimate_row(e) -> Dict[str, Any]:
    return e.to_record()


@click.group()
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), help='TOML run file')
@click.option('--output-dir', type=click.Path(file_okay=False), help='Output directory (default $DACPERC_OUTPUT_DIR)')
@click.option('--threads', type=int, help='Chain pool size (default: available parallelism)')
@click.pass_context
def cli(ctx, config_path, output_dir, threads):
    """dacperc - Divide-and-Colour percolation on the triangular lattice"""
    ctx.ensure_object(dict)
    ctx.obj.update({"config": config_path, "output_dir": output_dir, "threads": threads})


@cli.command()
@click.option('--beta', type=float, help='Inverse temperature (>= 0)')
@click.option('--box', type=(int, int), help='Box S_{n,m}')
@click.option('--buffer', type=int, help='Extra margin around the box (default 0)')
@click.option('--count', type=int, help='Number of configurations')
@click.option('--burn-in', 'burn_in', type=int)
@click.option('--thin', type=int)
@click.option('--seed', type=int)
@click.option('--r', type=float, help='Also colour each sample at this r')
@click.pass_context
@handle_errors
def sample(ctx, beta, box, buffer, count, burn_in, thin, seed, r):
    """Dump FK edge configurations (and coloured spins with --r)"""
    cfg = resolve(ctx, "sample", beta=beta, box=box, buffer=buffer, count=count,
                  burn_in=burn_in, thin=thin, seed=seed, r=r)
    require(cfg, "box")
    inner = Parallelogram.s(*cfg.box)
    dump = dump_samples(inner, cfg.beta, cfg.count, cfg.seed, cfg.burn_in, cfg.thin, cfg.buffer or 0, cfg.r)

    out = open_outputs(cfg)
    out.write_text("edges.txt", dump.edges_text())
    if cfg.r is not None:
        out.write_text("spins.txt", dump.spins_text())
        out.write_csv("marks.csv", ["sample", "cluster", "size", "mark"], dump.mark_rows)
    summary = write_summary(out, cfg, {}, {"configurations": len(dump.edge_lines)})
    click.echo(f"✅ {len(dump.edge_lines)} configurations sampled")
    finish(out, summary)


@cli.command()
@click.option('--graph', help='Library graph: single-edge, triangle or a literal such as S1,1')
@click.option('--p', type=float, help='Edge parameter (default 1 - exp(-beta))')
@click.option('--beta', type=float)
@click.option('--q', type=float, help='Cluster weight (>= 1)')
@click.option('--r', type=float, help='Also tabulate spin pair probabilities at this r')
@click.option('--lemmas', is_flag=True, help='Run the inequality suite on this graph')
@click.option('--russo', is_flag=True, help='Run the Russo audit on this graph')
@click.pass_context
@handle_errors
def exact(ctx, graph, p, beta, q, r, lemmas, russo):
    """Exact oracle tables for a tiny graph"""
    cfg = resolve(ctx, "exact", graph=graph, p=p, beta=beta, q=q, r=r)
    name = cfg.graph or "triangle"
    edge_p = cfg.p if cfg.p is not None else RcmParams(cfg.beta).p
    click.echo(f"🔬 Enumerating {name} at p={edge_p:.6g}, q={cfg.q:g}")
    tables = exact_tables(name, edge_p, cfg.q, cfg.r)

    out = open_outputs(cfg)
    out.write_json("tables.json", tables)
    out.write_csv("edges.csv", ["index", "marginal"], [(e["index"], e["marginal"]) for e in tables["edges"]])
    extra: Dict[str, Any] = {"Z": tables["Z"]}
    if lemmas:
        reports = lemma_suite([name], [edge_p], LEMMA_R_GRID, cfg.q, cfg.seed)
        _echo_lemma_reports(reports)
        out.write_csv("lemmas.csv", ["name", "graph", "p", "r", "instances", "violations", "min_margin", "passed"],
                      [_lemma_row(rep) for rep in reports])
        extra["lemma_violations"] = sum(rep.violations for rep in reports)
    if russo:
        rows = russo_suite(name, [edge_p], LEMMA_R_GRID, cfg.dr, cfg.q)
        _write_russo(out, rows)
        extra["russo_max_difference"] = max(row["difference"] for row in rows)
    summary = write_summary(out, cfg, {}, extra)
    click.echo(f"✅ Z = {tables['Z']:.17g}")
    finish(out, summary)


def _lemma_row(rep):
    p = "" if rep.p is None else rep.p
    r = "" if rep.r is None else rep.r
    margin = rep.min_margin if rep.instances else ""
    return rep.name, rep.graph, p, r, rep.instances, rep.violations, margin, rep.passed


def _echo_lemma_reports(reports):
    click.echo("🔬 Exact lemma suite")
    click.echo("=" * 60)
    failed = [rep for rep in reports if not rep.passed]
    for rep in failed:
        click.echo(f"❌ {rep.name} on {rep.graph} (p={rep.p}, r={rep.r}): {rep.violations} violations")
    click.echo(f"{'✅' if not failed else '❌'} {len(reports) - len(failed)}/{len(reports)} checks passed")


def _write_russo(out, rows):
    out.write_csv("russo.csv", ["graph", "p", "r", "event", "lhs", "rhs", "difference"],
                  [(x["graph"], x["p"], x["r"], x["event"], x["lhs"], x["rhs"], x["difference"]) for x in rows])


# ---------------------------------------------------------------- estimate


@cli.group()
def estimate():
    """Monte Carlo estimates of event probabilities"""
    pass


@estimate.command("crossing")
@sampler_options
@click.option('--r', type=float, help='Colouring parameter')
@click.option('--region', type=(str, str), help='KIND VALUE: square 32 | tall 16 | rect 16,48 | literal S0,4,0,8')
@click.option('--direction', type=click.Choice(["horizontal", "vertical"]))
@click.option('--sign', type=click.Choice(["+", "-"]))
@click.option('--compare-buffer', 'compare_buffer', type=int, help='Rerun at this buffer and report the difference')
@click.pass_context
@handle_errors
def estimate_crossing(ctx, beta, samples, chains, burn_in, thin, buffer, seed, r, region, direction, sign,
                      compare_buffer):
    """Probability of a crossing of a parallelogram"""
    cfg = resolve(ctx, "estimate crossing", beta=beta, samples=samples, chains=chains, burn_in=burn_in,
                  thin=thin, buffer=buffer, seed=seed, r=r,
                  region=region_literal(*region) if region else None,
                  direction=direction, sign=sign, compare_buffer=compare_buffer)
    require(cfg, "r", "region")
    spec = CrossingSpec(Parallelogram.parse(cfg.region), cfg.direction, cfg.sign)
    settings = settings_for(ctx, cfg)
    logger = RunLogger(cfg.command, cfg.fingerprint())
    click.echo(f"🎲 {spec.label} of {spec.region.literal()} at beta={cfg.beta:g}, r={cfg.r:g}")

    if cfg.compare_buffer is not None:
        first = cfg.buffer if cfg.buffer is not None else settings.box_around(spec.region).buffer
        result = buffer_sensitivity(cfg.beta, cfg.r, spec, cfg.samples, cfg.seed, (first, cfg.compare_buffer),
                                    settings, logger)
    else:
        result = crossing_prob(cfg.beta, cfg.r, spec, cfg.samples, cfg.seed, settings, logger)
    result.estimate.fingerprint = cfg.fingerprint()
    warn_thin(result.ensemble)

    out = open_outputs(cfg)
    out.write_csv("raw.csv", ["chain", "sample", "indicator"], result.raw_rows())
    write_plot(out, [(cfg.r, result.estimate.value, result.estimate.stderr)])
    extra = {"event": spec.label, "region": spec.region.literal(), "buffer": result.ensemble.box.buffer,
             "guard_fraction": result.ensemble.guard_fraction, "diagnostics": result.ensemble.diagnostics()}
    if result.sensitivity is not None:
        extra["buffer_sensitivity"] = result.sensitivity
    summary = write_summary(out, cfg, {spec.label: estimate_row(result.estimate)}, extra)
    click.echo(f"✅ P = {result.estimate.value:.6f} ± {result.estimate.stderr:.6f}")
    if result.sensitivity is not None:
        click.echo(f"📏 buffer difference = {result.sensitivity['difference']:.6f}")
    finish(out, summary)


@estimate.command("uniqueness")
@sampler_options
@click.option('--r', type=float)
@click.option('--window', 'windows', type=int, multiple=True, help='Window size (repeatable)')
@click.pass_context
@handle_errors
def estimate_uniqueness(ctx, beta, samples, chains, burn_in, thin, buffer, seed, r, windows):
    """Frequency of two large (+)-clusters that both cross the window"""
    cfg = resolve(ctx, "estimate uniqueness", beta=beta, samples=samples, chains=chains, burn_in=burn_in,
                  thin=thin, buffer=buffer, seed=seed, r=r, windows=list(windows))
    require(cfg, "r", "windows")
    logger = RunLogger(cfg.command, cfg.fingerprint())
    result = uniqueness_probe(cfg.beta, cfg.r, cfg.windows, cfg.samples, cfg.seed, settings_for(ctx, cfg), logger)

    out = open_outputs(cfg)
    out.write_csv("raw.csv", ["window", "value", "stderr", "count", "ess"],
                  [(w, e.value, e.stderr, e.count, e.ess) for w, e in result.items()])
    write_plot(out, [(w, e.value, e.stderr) for w, e in result.items()])
    summary = write_summary(out, cfg, {str(w): estimate_row(e) for w, e in result.items()})
    for w, e in result.items():
        click.echo(f"✅ window {w}: {e.value:.6f} ± {e.stderr:.6f}")
    finish(out, summary)


@estimate.command("cutpoints")
@sampler_options
@click.option('--n', 'n_list', type=int, multiple=True, help='Strip width n (repeatable)')
@click.option('--r', type=float, help='Colouring parameter (default 0.5)')
@click.pass_context
@handle_errors
def estimate_cutpoints(ctx, beta, samples, chains, burn_in, thin, buffer, seed, n_list, r):
    """Mean packed cut-point count of the lowest (-)-crossing of S_{n,4n}"""
    cfg = resolve(ctx, "estimate cutpoints", beta=beta, samples=samples, chains=chains, burn_in=burn_in,
                  thin=thin, buffer=buffer, seed=seed, n_list=list(n_list), r=r)
    require(cfg, "n_list")
    r_value = 0.5 if cfg.r is None else cfg.r
    logger = RunLogger(cfg.command, cfg.fingerprint())
    growth = cutpoint_growth(cfg.beta, cfg.n_list, cfg.samples, cfg.seed, r_value, settings_for(ctx, cfg), logger)
    warn_thin(*growth.ensembles.values())

    out = open_outputs(cfg)
    raw = []
    for n, ensemble in growth.ensembles.items():
        for c, run in enumerate(ensemble.runs):
            for j, count in enumerate(run.results):
                raw.append((n, c, j, "" if count is None else count))
    out.write_csv("raw.csv", ["n", "chain", "sample", "c"], raw)
    write_plot(out, [(n, e.value, e.stderr) for n, e in growth.estimates.items()])
    summary = write_summary(out, cfg, {str(n): estimate_row(e) for n, e in growth.estimates.items()},
                            {"found_fraction": {str(n): f for n, f in growth.found.items()},
                             "increasing": growth.increasing()})
    for n, e in growth.estimates.items():
        click.echo(f"✅ n={n}: E[c] = {e.value:.4f} ± {e.stderr:.4f} ({growth.found[n]:.1%} with a crossing)")
    finish(out, summary)


# ---------------------------------------------------------------- sweep


@cli.group()
def sweep():
    """Curves over r computed from shared samples"""
    pass


@sweep.command("rc")
@sampler_options
@click.option('--n', type=int, help='Width of S_{n,3n} (or S_{n,n} with --square)')
@click.option('--square', is_flag=True, help='Use H+ of S_{n,n}')
@click.pass_context
@handle_errors
def sweep_rc(ctx, beta, samples, chains, burn_in, thin, buffer, seed, n, square):
    """Locate the r where the crossing probability is 1/2"""
    cfg = resolve(ctx, "sweep rc", beta=beta, samples=samples, chains=chains, burn_in=burn_in,
                  thin=thin, buffer=buffer, seed=seed, n=n, square=square or None)
    require(cfg, "n")
    logger = RunLogger(cfg.command, cfg.fingerprint())
    result = rc_locator(cfg.beta, cfg.n, cfg.samples, cfg.seed, cfg.square, settings_for(ctx, cfg), logger)
    warn_thin(result.ensemble)

    out = open_outputs(cfg)
    raw = [(c, j, t) for c, run in enumerate(result.ensemble.runs) for j, t in enumerate(run.results)]
    out.write_csv("raw.csv", ["chain", "sample", "threshold"], raw)
    write_plot(out, [(r, e.value, e.stderr) for r, e in zip(result.grid.tolist(), result.curve)])
    summary = write_summary(out, cfg, {"r_hat": result.to_record()},
                            {"guard_fraction": result.ensemble.guard_fraction,
                             "diagnostics": result.ensemble.diagnostics()})
    click.echo(f"✅ r_hat = {result.r_hat:.6f} ± {result.stderr:.6f} ({result.spec.label} of {result.spec.region.literal()})")
    finish(out, summary)


@sweep.command("theta")
@sampler_options
@click.option('--r', 'r_grid', type=float, multiple=True, help='r value (repeatable)')
@click.option('--radius', 'radius_grid', type=int, multiple=True, help='Radius m (repeatable)')
@click.pass_context
@handle_errors
def sweep_theta(ctx, beta, samples, chains, burn_in, thin, buffer, seed, r_grid, radius_grid):
    """P(origin's (+)-cluster reaches distance m) over an (r, m) grid"""
    cfg = resolve(ctx, "sweep theta", beta=beta, samples=samples, chains=chains, burn_in=burn_in,
                  thin=thin, buffer=buffer, seed=seed, r_grid=list(r_grid), radius_grid=list(radius_grid))
    require(cfg, "r_grid", "radius_grid")
    logger = RunLogger(cfg.command, cfg.fingerprint())
    curve = theta_curve(cfg.beta, cfg.r_grid, cfg.radius_grid, cfg.samples, cfg.seed, settings_for(ctx, cfg), logger)
    warn_thin(curve.ensemble)

    out = open_outputs(cfg)
    raw = [(c, j, r, reach) for c, run in enumerate(curve.ensemble.runs) for j, reaches in enumerate(run.results)
           for r, reach in zip(curve.r_grid, reaches)]
    out.write_csv("raw.csv", ["chain", "sample", "r", "reach"], raw)
    out.write_csv("curve.csv", ["r", "m", "value", "stderr"], [(r, m, e.value, e.stderr) for r, m, e in curve.rows()])
    largest = curve.radius_grid[-1]
    write_plot(out, [(r, curve.estimates[(r, largest)].value, curve.estimates[(r, largest)].stderr)
                     for r in curve.r_grid])
    summary = write_summary(out, cfg, {f"{r:g}@{m}": estimate_row(e) for r, m, e in curve.rows()},
                            {"monotone": curve.is_monotone()})
    click.echo(f"✅ {len(curve.estimates)} grid points, pathwise monotone: {curve.is_monotone()}")
    finish(out, summary)


# ---------------------------------------------------------------- audit


@cli.group()
def audit():
    """Exact and per-sample identity checks"""
    pass


@audit.command("russo")
@click.option('--box', type=(int, int), help='Tiny box S_{n,m}')
@click.option('--graph', help='Library graph instead of a box')
@click.option('--p', type=float)
@click.option('--beta', type=float)
@click.option('--r', 'r_grid', type=float, multiple=True)
@click.option('--dr', type=float, help='Finite-difference step')
@click.pass_context
@handle_errors
def audit_russo(ctx, box, graph, p, beta, r_grid, dr):
    """Compare dP/dr with -E[number of pivotal clusters]"""
    cfg = resolve(ctx, "audit russo", box=box, graph=graph, p=p, beta=beta, r_grid=list(r_grid), dr=dr)
    name = cfg.graph or (f"S{cfg.box[0]},{cfg.box[1]}" if cfg.box else "S1,1")
    edge_p = cfg.p if cfg.p is not None else RcmParams(cfg.beta).p
    rows = russo_suite(name, [edge_p], cfg.r_grid or list(LEMMA_R_GRID), cfg.dr, cfg.q)

    out = open_outputs(cfg)
    _write_russo(out, rows)
    worst = max(row["difference"] for row in rows)
    summary = write_summary(out, cfg, {}, {"graph": name, "max_difference": worst,
                                           "agrees": all(row["agrees"] for row in rows)})
    status = "✅" if all(row["agrees"] for row in rows) else "❌"
    click.echo(f"{status} {len(rows)} audits, max |lhs - rhs| = {worst:.3e}")
    finish(out, summary)


@audit.command("lemmas")
@click.option('--graph', 'graphs', multiple=True, help='Library graph (repeatable)')
@click.option('--p', 'p_grid', type=float, multiple=True)
@click.option('--r', 'r_grid', type=float, multiple=True)
@click.option('--q', type=float)
@click.option('--seed', type=int)
@click.pass_context
@handle_errors
def audit_lemmas(ctx, graphs, p_grid, r_grid, q, seed):
    """Exact domination and independence inequalities over a graph x (p, r) grid"""
    cfg = resolve(ctx, "audit lemmas", graphs=list(graphs), p_grid=list(p_grid), r_grid=list(r_grid), q=q, seed=seed)
    reports = lemma_suite(cfg.graphs or list(LEMMA_GRAPHS), cfg.p_grid or list(LEMMA_P_GRID),
                          cfg.r_grid or list(LEMMA_R_GRID), cfg.q, cfg.seed)
    _echo_lemma_reports(reports)
    out = open_outputs(cfg)
    out.write_csv("lemmas.csv", ["name", "graph", "p", "r", "instances", "violations", "min_margin", "passed"],
                  [_lemma_row(rep) for rep in reports])
    violations = sum(rep.violations for rep in reports)
    summary = write_summary(out, cfg, {}, {"checks": len(reports), "violations": violations,
                                           "failed": [rep.to_record() for rep in reports if not rep.passed]})
    finish(out, summary)


@audit.command("finite-size")
@sampler_options
@click.option('--big-n', 'big_n', type=int, help='N of S_{N,3N}')
@click.option('--eps', type=float, help='Tolerance epsilon in (0, 1)')
@click.option('--r', type=float)
@click.pass_context
@handle_errors
def audit_finite_size(ctx, beta, samples, chains, burn_in, thin, buffer, seed, big_n, eps, r):
    """Evaluate the two finite-size percolation inequalities"""
    cfg = resolve(ctx, "audit finite-size", beta=beta, samples=samples, chains=chains, burn_in=burn_in,
                  thin=thin, buffer=buffer, seed=seed, big_n=big_n, eps=eps, r=r)
    require(cfg, "big_n", "eps", "r")
    logger = RunLogger(cfg.command, cfg.fingerprint())
    report = finite_size_check(cfg.beta, cfg.big_n, cfg.eps, cfg.r, cfg.samples, cfg.seed,
                               settings_for(ctx, cfg), logger)

    out = open_outputs(cfg)
    out.write_csv("report.csv", ["condition", "estimate", "bound", "target", "holds"], [
        ("range", report.range_frequency.value, report.lhs, report.eps, report.range_condition),
        ("crossing", report.crossing.value, report.crossing_lower, 1.0 - report.eps, report.crossing_condition),
    ])
    summary = write_summary(out, cfg, {"finite_size": report.to_record()})
    click.echo(f"{'✅' if report.range_condition else '❌'} (N+1)(3N+1) nu(D >= {report.range_threshold}) <= {report.lhs:.4g}")
    click.echo(f"{'✅' if report.crossing_condition else '❌'} P(V+) >= {report.crossing_lower:.4g}")
    finish(out, summary)


@audit.command("duality")
@sampler_options
@click.option('--n', type=int, help='Side of the square S_{n,n}')
@click.option('--r', type=float, help='Colouring parameter (default 0.5)')
@click.pass_context
@handle_errors
def audit_duality(ctx, beta, samples, chains, burn_in, thin, buffer, seed, n, r):
    """H- and V+ complementarity and the reflected H+ = V+ identity, per sample"""
    cfg = resolve(ctx, "audit duality", beta=beta, samples=samples, chains=chains, burn_in=burn_in,
                  thin=thin, buffer=buffer, seed=seed, n=n, r=r)
    require(cfg, "n")
    logger = RunLogger(cfg.command, cfg.fingerprint())
    report = duality_audit(cfg.beta, cfg.n, cfg.samples, cfg.seed, 0.5 if cfg.r is None else cfg.r,
                           settings_for(ctx, cfg), logger)
    out = open_outputs(cfg)
    summary = write_summary(out, cfg, {"duality": report.to_record()})
    click.echo(f"{'✅' if report.exact else '❌'} P(H-) + P(V+) = {report.h_minus.value + report.v_plus.value:.6f}, "
               f"{report.complement_failures + report.reflection_failures} per-sample failures")
    finish(out, summary)


# ---------------------------------------------------------------- fit


@cli.group()
def fit():
    """Exponential tail fits"""
    pass


def _tail_outputs(cfg, fit_result, ensemble, label):
    out = open_outputs(cfg)
    raw = [(c, j, v, t) for c, run in enumerate(ensemble.runs) for j, (v, t) in enumerate(run.results)]
    out.write_csv("raw.csv", ["chain", "sample", "value", "truncated"], raw)
    out.write_csv("survival.csv", ["x", "survival"], zip(fit_result.support.tolist(), fit_result.survival.tolist()))
    write_plot(out, [(x, y, 0.0) for x, y in zip(fit_result.x.tolist(), fit_result.log_survival.tolist())])
    summary = write_summary(out, cfg, {label: fit_result.to_record()},
                            {"guard_fraction": ensemble.guard_fraction, "diagnostics": ensemble.diagnostics()})
    if fit_result.degenerate:
        click.echo("⚠️  degenerate tail: fewer than two bins with enough observations")
    else:
        click.echo(f"✅ slope = {fit_result.slope:.6f}, R^2 = {fit_result.r_squared:.4f}, "
                   f"truncated = {fit_result.truncated_fraction:.2%}")
    finish(out, summary)


@fit.command("cluster-tail")
@sampler_options
@click.option('--r', type=float)
@click.option('--window', type=int, help='Half-width W of [-W, W]^2')
@click.pass_context
@handle_errors
def fit_cluster_tail(ctx, beta, samples, chains, burn_in, thin, buffer, seed, r, window):
    """Tail of the origin's (+)-cluster size"""
    cfg = resolve(ctx, "fit cluster-tail", beta=beta, samples=samples, chains=chains, burn_in=burn_in,
                  thin=thin, buffer=buffer, seed=seed, r=r, window=window)
    require(cfg, "r", "window")
    logger = RunLogger(cfg.command, cfg.fingerprint())
    fit_result, ensemble = cluster_tail(cfg.beta, cfg.r, cfg.samples, cfg.seed, cfg.window,
                                        settings_for(ctx, cfg), logger)
    warn_thin(ensemble)
    _tail_outputs(cfg, fit_result, ensemble, "cluster_tail")


@fit.command("fk-range")
@sampler_options
@click.option('--window', type=int, help='Half-width W of [-W, W]^2')
@click.pass_context
@handle_errors
def fit_fk_range(ctx, beta, samples, chains, burn_in, thin, buffer, seed, window):
    """Tail of the FK dependence range at the origin"""
    cfg = resolve(ctx, "fit fk-range", beta=beta, samples=samples, chains=chains, burn_in=burn_in,
                  thin=thin, buffer=buffer, seed=seed, window=window)
    require(cfg, "window")
    logger = RunLogger(cfg.command, cfg.fingerprint())
    fit_result, ensemble = fk_range_tail(cfg.beta, cfg.samples, cfg.seed, cfg.window, settings_for(ctx, cfg), logger)
    warn_thin(ensemble)
    _tail_outputs(cfg, fit_result, ensemble, "fk_range")
    if not fit_result.degenerate:
        click.echo(f"📏 psi_hat = {fit_result.rate:.6f}")


@cli.command()
def config():
    """Show dacperc configuration and environment"""
    click.echo("\n🔧 dacperc Configuration:")
    click.echo(f"  Environment: {os.getenv('ENV_STATUS', 'production')}")
    click.echo(f"  Output directory: {DEFAULT_OUTPUT_DIR}")
    click.echo(f"  Log directory: {LOG_DIR}")
    click.echo(f"  Threads: {DEFAULT_THREADS}")
    click.echo(f"  Burn-in / thin / chains: {defaults.DEFAULT_BURN_IN} / {defaults.DEFAULT_THIN} / {defaults.DEFAULT_CHAINS}")
    click.echo(f"  Minimum buffer: {defaults.MIN_BUFFER}")
    click.echo(f"  Guard span fraction: {defaults.GUARD_SPAN_FRACTION}")
    click.echo(f"  Oracle edge cap: {defaults.ORACLE_EDGE_CAP}")


def main():
    """Main entry point for 'dacperc' command"""
    try:
        cli(obj={})
    except DacpercError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(e.exit_code)
    except Exception as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(1)


if __name__ == '__main__':
    main()
