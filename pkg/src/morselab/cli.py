"""Command-line front end.

Exit codes, uniform across subcommands:
  0  the command ran and produced verdicts/values
  1  input errors (bad flags, unknown names, unparseable words, failed
     preconditions)
  2  the question is outside the scope of the method (triangle in the
     defining graph, etc.)
  3  a search or enumeration budget was exceeded; stderr carries guidance

Balls are cached under MORSELAB_CACHE_DIR when that variable is set.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from fractions import Fraction

import click

from .cayley import (
    FinitelyGenerated,
    FreeSubgroupGeometry,
    Special,
    build_ball,
    greedy_special_distance,
    subgroup_distance,
)
from .classify import classify_special_racg, loxodromic_report, morse_boundary_witness
from .divergence import (
    emit_profile_csv,
    geodesic_divergence,
    geodesic_divergence_ball,
    geodesic_lower_divergence,
    growth_diagnostic,
    pip1_witness_path,
    sigma_profile,
)
from .errors import (
    BudgetExceeded,
    InsufficientData,
    MorselabError,
    ParseError,
    PreconditionError,
    ScopeError,
    Unresolved,
    ValidationError,
)
from .graphs import enumerate_induced_4cycles
from .recipes import parse_range, resolve_graph, run_recipe
from .words import RAAG, RACG, Presentation

# this tool reserves exit code 2 for out-of-scope verdicts; bad command
# lines are plain input errors
click.UsageError.exit_code = 1


def guarded(fn):
    """Map library errors onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BrokenPipeError:
            # downstream closed the pipe (e.g. | head); die quietly, and
            # point stdout at devnull so the shutdown flush cannot raise
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
            sys.exit(1)
        except BudgetExceeded as err:
            click.echo(f"error: {err}", err=True)
            click.echo(
                "guidance: re-run with a larger --rmax/--budget, or set "
                "MORSELAB_CACHE_DIR to reuse finished balls",
                err=True,
            )
            sys.exit(3)
        except ScopeError as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(2)
        except (OSError, MorselabError) as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(1)

    return wrapper


def _presentation(graph: str, kind: str) -> Presentation:
    return Presentation(resolve_graph(graph), kind)


def _subgroup(p: Presentation, subset: str | None, gens: str | None):
    if subset and gens:
        raise ValidationError("give either --subset or --gens, not both")
    if subset:
        return Special(p.graph.vertex_set(subset.split(",")))
    if gens:
        return FinitelyGenerated(
            tuple(p.reduce(p.parse_word(text)) for text in gens.split(","))
        )
    raise ValidationError("a subgroup is required: --subset or --gens")


def _rho(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"bad rho {text!r}; want a rational like 1 or 1/2")


graph_option = click.option(
    "--graph", required=True,
    help="Family name (c4, p4, c5, cycle:<n>, gamma_d:<d>, omega_d:<d>) "
         "or a path to a graph JSON file.",
)
kind_option = click.option(
    "--kind", type=click.Choice([RACG, RAAG]), default=RACG, show_default=True,
    help="Interpret the graph as a Coxeter or an Artin presentation.",
)
threads_option = click.option(
    "--threads", type=click.IntRange(min=1), default=1, show_default=True,
    help="Worker threads; results are identical for any value.",
)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="morselab")
def cli():
    """Word geometry of right-angled Coxeter and Artin groups."""


@cli.command()
@graph_option
@click.option("--subset", required=True, help="Comma-separated vertex names.")
@guarded
def classify(graph, subset):
    """Classify the special subgroup on SUBSET; JSON report on stdout.

    Exits 2 when the defining graph is outside the method's scope
    (all verdicts "outside_scope").
    """
    g = resolve_graph(graph)
    report = classify_special_racg(g, g.vertex_set(subset.split(",")))
    click.echo(report.to_json())
    if "outside_scope" in report.verdicts.values():
        sys.exit(2)


@cli.command()
@graph_option
@kind_option
@click.option("--word", required=True, help='Word like "a1 b2^-1 a1".')
@guarded
def reduce(graph, kind, word):
    """Print the canonical (shortlex-least) form of WORD and its length."""
    p = _presentation(graph, kind)
    canon = p.reduce(p.parse_word(word))
    click.echo(p.format_word(canon))
    click.echo(f"length {len(canon)}")


@cli.command()
@graph_option
@kind_option
@click.option("--word", required=True, help="Element to measure from.")
@click.option("--subset", default=None, help="Special subgroup (vertex names).")
@click.option("--gens", default=None,
              help="Finitely generated subgroup (comma-separated words).")
@click.option("--rmax", type=int, default=12, show_default=True,
              help="Ball radius for finitely generated subgroups.")
@guarded
def distance(graph, kind, word, subset, gens, rmax):
    """Distance from WORD to the identity or to a subgroup."""
    p = _presentation(graph, kind)
    g = p.reduce(p.parse_word(word))
    if not subset and not gens:
        click.echo(str(len(g)))
        return
    spec = _subgroup(p, subset, gens)
    if isinstance(spec, Special):
        click.echo(str(greedy_special_distance(p, g, spec.vertices)))
        return
    try:
        geom = FreeSubgroupGeometry(p, spec.generators)
    except (PreconditionError, ValidationError):
        ball = build_ball(p, rmax)
        click.echo(str(subgroup_distance(ball, spec, g)))
    else:
        click.echo(str(geom.distance(g)))


@cli.group()
def divergence():
    """Divergence measurements; CSV on stdout (or --out) plus a summary."""


def _growth_summary(values: dict[int, int | float]) -> str:
    try:
        diag = growth_diagnostic(values)
    except InsufficientData:
        return "growth: insufficient finite rows for a diagnostic"
    return (
        f"growth: slope={diag.slope:.3f} "
        f"superlinear={'true' if diag.superlinear else 'false'}"
    )


def _emit(text: str, out: str | None):
    if out and out != "-":
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@divergence.command()
@graph_option
@kind_option
@threads_option
@click.option("--subset", default=None, help="Special subgroup (vertex names).")
@click.option("--gens", default=None,
              help="Finitely generated subgroup (comma-separated words).")
@click.option("--n", "n", type=int, required=True)
@click.option("--rho", default="1", show_default=True)
@click.option("--r", "r_range", required=True, help='Radii, e.g. "2..5" or "2,4".')
@click.option("--rmax", type=int, required=True, help="Measurement window radius.")
@click.option("--pair-cap", type=int, default=100_000, show_default=True)
@click.option("--budget", type=int, default=2_000_000, show_default=True,
              help="Ball element budget.")
@click.option("--out", default=None, help="CSV destination (default stdout).")
@guarded
def sigma(graph, kind, threads, subset, gens, n, rho, r_range, rmax,
          pair_cap, budget, out):
    """Lower relative divergence profile σⁿ_ρ(r) of a subgroup."""
    p = _presentation(graph, kind)
    spec = _subgroup(p, subset, gens)
    profile = sigma_profile(
        p, spec, n, _rho(rho), parse_range(r_range), rmax,
        pair_cap=pair_cap, element_budget=budget,
    )
    summary = _growth_summary(profile.values())
    _emit(emit_profile_csv(profile) + f"# {summary}\n", out)
    if out and out != "-":
        click.echo(summary)


def _geodesic_common(fn):
    for deco in (
        graph_option, kind_option, threads_option,
        click.option("--period", required=True,
                     help="Comma-separated generator names spelling the axis."),
        click.option("--r", "r_range", required=True, help='Radii, e.g. "2..5".'),
        click.option("--rmax", type=int, required=True),
        click.option("--engine", type=click.Choice(["lazy", "ball"]),
                     default="lazy", show_default=True,
                     help="Lazy word search, or one explicit indexed ball."),
        click.option("--out", default=None, help="CSV destination (default stdout)."),
    )[::-1]:
        fn = deco(fn)
    return fn


def _emit_simple(values: dict[int, int | float], out: str | None):
    body = "r,value\n" + "".join(
        f"{r},{'inf' if v == float('inf') else v}\n" for r, v in sorted(values.items())
    )
    summary = _growth_summary(values)
    _emit(body + f"# {summary}\n", out)
    if out and out != "-":
        click.echo(summary)


@divergence.command()
@_geodesic_common
@guarded
def geodesic(graph, kind, threads, period, r_range, rmax, engine, out):
    """Geodesic divergence Div(r) of the axis spelled by --period."""
    p = _presentation(graph, kind)
    word = p.reduce(p.parse_word(" ".join(period.split(","))))
    radii = parse_range(r_range)
    if engine == "ball":
        values = geodesic_divergence_ball(p, word, radii, rmax)
    else:
        values = geodesic_divergence(p, word, radii, rmax)
    _emit_simple(values, out)


@divergence.command()
@_geodesic_common
@guarded
def ldiv(graph, kind, threads, period, r_range, rmax, engine, out):
    """Lower geodesic divergence: Div minimized over basepoint offsets."""
    p = _presentation(graph, kind)
    word = p.reduce(p.parse_word(" ".join(period.split(","))))
    if engine == "ball":
        raise ValidationError("ldiv supports only the lazy engine")
    values = geodesic_lower_divergence(p, word, parse_range(r_range), rmax)
    _emit_simple(values, out)


@cli.group()
def witness():
    """Constructive certificates behind classifier verdicts."""


@witness.command()
@graph_option
@click.option("--subset", required=True, help="Comma-separated vertex names.")
@click.option("--n", "n", type=int, default=2, show_default=True)
@click.option("--r", "r", type=int, required=True)
@guarded
def pip1(graph, subset, n, r):
    """Detour path of length (4n+2)r certifying a failing subset."""
    g = resolve_graph(graph)
    s1 = g.vertex_set(subset.split(","))
    report = classify_special_racg(g, s1)
    if report["strongly_quasiconvex"] == "outside_scope":
        raise ScopeError(report.witnesses["scope"]["note"])
    if report["strongly_quasiconvex"] is True:
        raise PreconditionError(
            "subset is strongly quasiconvex; there is no failing pattern"
        )
    cycle_names = report.witnesses["strongly_quasiconvex"]["cycle"]
    cyc = next(
        c for c in enumerate_induced_4cycles(g)
        if sorted(c.names(g)) == sorted(cycle_names)
    )
    p = Presentation(g, RACG)
    wit = pip1_witness_path(g, sorted(s1), cyc, n, r)
    click.echo(json.dumps({
        "length": wit.length,
        "endpoints": [p.format_word(e) for e in wit.endpoints],
        "path": [p.format_word(v) for v in wit.path],
    }, indent=2))


@witness.command("morse-boundary")
@graph_option
@click.option("--max-len", type=int, default=8, show_default=True)
@guarded
def morse_boundary(graph, max_len):
    """Shortest stable induced cycle longer than 4, if any within --max-len."""
    g = resolve_graph(graph)
    cyc = morse_boundary_witness(g, max_len)
    if cyc is None:
        click.echo(f"none (all induced cycles of length 5..{max_len} checked)")
    else:
        click.echo(" ".join(cyc.names(g)))


@cli.command()
@click.argument("name")
@click.option("--rmax", type=int, default=None,
              help="Override the recipe's measurement window.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for the sampled checks.")
@click.option("--cache-dir", default=None,
              help="Ball cache directory (defaults to MORSELAB_CACHE_DIR).")
@guarded
def recipe(name, rmax, seed, cache_dir):
    """Run a canned experiment battery (E1..E5); PASS/FAIL per check."""
    results = run_recipe(name, rmax=rmax, seed=seed, cache_dir=cache_dir)
    for res in results:
        click.echo(res.line())
    if not all(res.passed for res in results):
        sys.exit(1)


def main(argv=None):
    try:
        return cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)


if __name__ == "__main__":
    main()
