"""Command-line front end.

Exit status is 0 on success, 1 when a computation fails (a JSON error
object goes to stderr) and 2 for usage errors. Output is deterministic:
JSON keys are sorted and no timestamps are written.
"""

import json
import os
import sys

import click
import numpy as np

from .errors import WorkbenchError
from .invariants6 import (
    BundleData,
    bundle_over_connected_sum,
    classify_bundle,
    novelty_test,
    proposition_manifold,
)
from .neck_solver import SurgeryInput, solve_neck
from .plumbing import PlumbingGraph, schedule_radii, validate_theorem_b
from .profiles import profile_header, scale_profiles, solve_fc, solve_h0, verify_profile_properties
from .warp_core import DEFAULT_DENSITY, uniform_grid, write_profile_csv

DENSITY_ENV = "WORKBENCH_GRID_DENSITY"


class ComputationFailed(click.ClickException):
    exit_code = 1

    def __init__(self, payload):
        super().__init__(payload.get("message", "computation failed"))
        self.payload = payload

    def show(self, file=None):
        click.echo(_dumps(self.payload), err=True)


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False, default=_jsonable)


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    raise TypeError(f"not serialisable: {x!r}")


def _emit(obj, output):
    text = _dumps(obj) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _density(value):
    if value is not None:
        return value
    env = os.environ.get(DENSITY_ENV)
    if env is None:
        return DEFAULT_DENSITY
    try:
        d = float(env)
    except ValueError:
        raise click.UsageError(f"{DENSITY_ENV} must be a number, got {env!r}")
    if not d > 0:
        raise click.UsageError(f"{DENSITY_ENV} must be positive")
    return d


def _ints(values, name):
    out = []
    for v in values:
        for part in str(v).split(","):
            part = part.strip()
            if not part:
                continue
            try:
                out.append(int(part))
            except ValueError:
                raise click.BadParameter(f"not an integer: {part!r}", param_hint=name)
    return out


def _surgery_input(**kw):
    try:
        return SurgeryInput(**kw)
    except (TypeError, ValueError) as exc:
        raise click.UsageError(str(exc))


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read {path}: {exc}")


def _run(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except WorkbenchError as exc:
        raise ComputationFailed(exc.to_dict())


tol_option = click.option("--tol", type=float, default=1e-10, show_default=True,
                          help="Integrator tolerance.")
tmax_option = click.option("--t-max", "t_max", type=float, default=100.0, show_default=True,
                           help="Length of the model-profile interval.")
density_option = click.option("--density", type=float, default=None,
                              help=f"Points per unit length (default ${DENSITY_ENV} "
                                   f"or {DEFAULT_DENSITY}).")


@click.group()
def cli():
    """Positive-Ricci surgery workbench."""


@cli.command()
@click.argument("input_json", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Certificate JSON path.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False),
              help="Write the profile table on the certification grid here.")
@tol_option
@tmax_option
@density_option
def neck(input_json, output, csv_path, tol, t_max, density):
    """Solve one neck from a SurgeryInput JSON file."""
    d = _read_json(input_json)
    try:
        inp = SurgeryInput.from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise click.UsageError(f"bad surgery input: {exc}")
    density = _density(density)
    cert = _run(solve_neck, inp, tol=tol, t_max=t_max, density=density)
    _emit(cert.to_dict(), output)
    if csv_path:
        grid = uniform_grid(0.0, cert.t0, density, 10_001)
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            write_profile_csv(fh, cert.profiles, inp.p, inp.q, grid, header=inp.to_dict())


@cli.command()
@click.option("--p", "p", type=int, required=True)
@click.option("--q", "q", type=int, required=True)
@click.option("--ratio-rn", "ratio_RN", type=float, required=True, help="R/N in (0, pi/2).")
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--r", "r", type=float, required=True)
@tol_option
@tmax_option
@density_option
def kappa(p, q, ratio_RN, lam, r, tol, t_max, density):
    """Print the surgery constant kappa."""
    inp = _surgery_input(p=p, q=q, ratio_RN=ratio_RN, lam=lam, r=r)
    cert = _run(solve_neck, inp, tol=tol, t_max=t_max, density=_density(density))
    click.echo(repr(cert.kappa))


@cli.command()
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--C", "C", type=float, required=True)
@click.option("--t-max", "t_max", type=float, default=50.0, show_default=True)
@tol_option
@click.option("--p", "p", type=int, default=3, show_default=True)
@click.option("--q", "q", type=int, default=3, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False),
              help="Write (h0, f_C) and Ricci columns here.")
@click.option("--points", type=int, default=2001, show_default=True,
              help="Rows in the CSV table.")
def profiles(lam, C, t_max, tol, p, q, csv_path, points):
    """Solve the model profiles and report their properties."""
    try:
        h0 = solve_h0(lam, t_max, tol)
        fc = solve_fc(C, h0)
    except WorkbenchError as exc:
        raise ComputationFailed(exc.to_dict())
    except ValueError as exc:
        raise click.UsageError(str(exc))
    report = verify_profile_properties(h0, fc)
    out = {"header": profile_header(h0, fc), "properties": report.as_dict(),
           "passed": report.passed}
    _emit(out, None)
    if csv_path:
        grid = np.linspace(0.0, fc.t_max, points)
        pair = scale_profiles(h0, fc, 1.0, 1.0)
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            write_profile_csv(fh, pair, p, q, grid, header=profile_header(h0, fc))


@cli.group()
def plumb():
    """Plumbing graphs."""


def _load_graph(path):
    try:
        return PlumbingGraph.from_dict(_read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise click.UsageError(f"bad graph: {exc}")


@plumb.command("validate")
@click.argument("graph_json", type=click.Path(exists=True, dir_okay=False))
@click.option("--root", default=None, help="Root node (default: first node).")
def plumb_validate(graph_json, root):
    """Check the positive-Ricci boundary hypotheses."""
    g = _load_graph(graph_json)
    root = root or g.nodes[0].name
    if root not in g.by_name:
        raise click.BadParameter(f"unknown node {root!r}", param_hint="--root")
    report = validate_theorem_b(g, root)
    out = {"root": root, **report.as_dict()}
    _emit(out, None)
    if not report.boundary_positive_ricci:
        raise ComputationFailed({"error": "validation-failed",
                                 "message": "; ".join(report.reasons),
                                 "reasons": list(report.reasons)})


@plumb.command("schedule")
@click.argument("graph_json", type=click.Path(exists=True, dir_okay=False))
@click.option("--root", default=None, help="Root node (default: first node).")
@click.option("--inputs", "inputs_json", type=click.Path(exists=True, dir_okay=False),
              help="JSON {node: {ratio_RN, lambda, r}, ...}; per-node values override flags.")
@click.option("--ratio-rn", "ratio_RN", type=float, default=None)
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--r", "r", type=float, default=None)
@click.option("--output", "-o", type=click.Path(dir_okay=False))
@tol_option
@tmax_option
@density_option
def plumb_schedule(graph_json, root, inputs_json, ratio_RN, lam, r, output, tol, t_max,
                   density):
    """Run the radius cascade and write the schedule JSON."""
    g = _load_graph(graph_json)
    root = root or g.nodes[0].name
    if root not in g.by_name:
        raise click.BadParameter(f"unknown node {root!r}", param_hint="--root")
    per_node = _read_json(inputs_json) if inputs_json else {}
    caps = per_node.pop("radius_caps", {}) if isinstance(per_node, dict) else {}
    inputs = {}
    for n in g.nodes:
        d = per_node.get(n.name, {})
        vals = {"ratio_RN": d.get("ratio_RN", ratio_RN), "lam": d.get("lambda", lam),
                "r": d.get("r", r)}
        missing = [k for k, v in vals.items() if v is None]
        if missing:
            raise click.UsageError(f"node {n.name}: missing {missing}")
        inputs[n.name] = _surgery_input(p=n.base_dim, q=n.fiber_dim, **vals)
    sched = _run(schedule_radii, g, root, inputs, radius_caps=caps, tol=tol, t_max=t_max,
                 density=_density(density))
    _emit(sched.to_dict(), output)


@cli.group()
def invariants():
    """Invariants of 6-manifolds."""


def _bundle(gamma, alpha, beta):
    try:
        return BundleData(tuple(_ints(gamma, "--gamma")), alpha, tuple(_ints(beta, "--beta")))
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _sum_spec(spec_path, m, gamma, alpha, beta):
    if spec_path:
        d = _read_json(spec_path)
        try:
            blocks = [BundleData(tuple(b.get("gamma", ())), b.get("alpha", 0),
                                 tuple(b.get("beta", ()))) for b in d.get("bundles", ())]
            return proposition_manifold(int(d.get("m", 0)), blocks)
        except (TypeError, ValueError, AttributeError) as exc:
            raise click.UsageError(f"bad sum spec: {exc}")
    if alpha is None:
        raise click.UsageError("give --spec or --alpha (with --gamma/--beta)")
    data = _bundle(gamma, alpha, beta)
    if m:
        return proposition_manifold(m, [data])
    return bundle_over_connected_sum(data)


spec_option = click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False),
                           help='JSON {"m": int, "bundles": [{"gamma", "alpha", "beta"}]}.')
gamma_option = click.option("--gamma", multiple=True, help="Orientation signs, e.g. +1,-1.")
beta_option = click.option("--beta", multiple=True, help="Entries in {0, 1}.")


@invariants.command("compute")
@spec_option
@click.option("--m", type=int, default=0, help="Number of S3xS3 summands.")
@gamma_option
@click.option("--alpha", type=int, default=None)
@beta_option
def invariants_compute(spec_path, m, gamma, alpha, beta):
    """Print the invariant system as JSON."""
    _emit(_sum_spec(spec_path, m, gamma, alpha, beta).to_dict(), None)


@invariants.command("classify")
@gamma_option
@beta_option
@click.option("--p1", "p1_total", type=int, required=True, help="<p1(xi), [B]>.")
def invariants_classify(gamma, beta, p1_total):
    """Print the alpha of the bundle with the given p1."""
    g, b = _ints(gamma, "--gamma"), _ints(beta, "--beta")
    if len(g) != len(b):
        raise click.UsageError("--gamma and --beta need the same number of entries")
    alpha = _run(classify_bundle, g, b, p1_total)
    _emit({"alpha": alpha, "gamma": g, "beta": b, "p1": p1_total}, None)


@invariants.command("distinguish")
@spec_option
@click.option("--m", type=int, default=0)
@gamma_option
@click.option("--alpha", type=int, default=None)
@beta_option
def invariants_distinguish(spec_path, m, gamma, alpha, beta):
    """Run the novelty test."""
    inv = _sum_spec(spec_path, m, gamma, alpha, beta)
    _emit({"invariants": inv.to_dict(), **novelty_test(inv).as_dict()}, None)


def main(argv=None):
    return cli.main(args=argv, prog_name="surgerybench")


if __name__ == "__main__":
    sys.exit(main())
