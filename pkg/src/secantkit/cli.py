"""Command-line front-end.

Thin client over the handler layer: each subcommand builds a request
model, invokes the shared handler in-process, and renders the response as
human-readable text (12 significant digits) or as the JSON wire format via
--json. Exit codes: 0 for completed analyses (failing verdicts included),
1 for input errors, 2 for numerical failures.
"""

from __future__ import annotations

import json
import os
import sys

import click

from .handlers import (
    handle_cascade,
    handle_gain,
    handle_matrix,
    handle_simulate,
    handle_spr,
)
from .nyquist import emit_nyquist
from .poly import Polynomial, RationalTransfer
from .schemas import (
    CascadeRequest,
    ExtendedReal,
    GainRequest,
    MatrixRequest,
    ScenarioModel,
    SimulateRequest,
    SprRequest,
)
from .simulate import Signal

__all__ = ["cli", "run", "entry"]


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _fmt_ext(x: ExtendedReal) -> str:
    return "inf" if x.infinite else _fmt(x.unwrap())


def _csv_floats(_ctx, param, value):
    if value is None:
        return None
    try:
        out = [float(tok) for tok in value.split(",") if tok.strip() != ""]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}")
    if not out:
        raise click.BadParameter("expected at least one coefficient")
    return out


@click.group()
def cli():
    """Passivity gains, secant-condition checks, and cascade simulation."""


@cli.command("gain")
@click.option("--num", required=True, callback=_csv_floats,
              help="numerator coefficients, ascending, comma-separated")
@click.option("--den", required=True, callback=_csv_floats,
              help="denominator coefficients, ascending, comma-separated")
@click.option("--json", "as_json", is_flag=True, help="emit the JSON payload")
@click.option("--full", is_flag=True, help="include OSP and SPR verdicts")
def gain_cmd(num, den, as_json, full):
    """Secant and H-infinity gains of a stable rational transfer function."""
    resp = handle_gain(GainRequest(num=num, den=den, full=full))
    if as_json:
        click.echo(resp.model_dump_json())
        return
    click.echo(f"num: {','.join(map(_fmt, resp.input.num))}")
    click.echo(f"den: {','.join(map(_fmt, resp.input.den))}")
    line = f"secant_gain = {_fmt_ext(resp.secant_gain)}"
    if resp.attained_at_infinity:
        line += " (attained in the high-frequency limit)"
    elif resp.witness_omega is not None:
        line += f" at omega = {_fmt(resp.witness_omega)}"
    if resp.reason:
        line += f" [{resp.reason}]"
    click.echo(line)
    hline = f"hinf_gain = {_fmt_ext(resp.hinf_gain)}"
    if resp.hinf_witness_omega is not None:
        hline += f" at omega = {_fmt(resp.hinf_witness_omega)}"
    click.echo(hline)
    if resp.osp is not None:
        click.echo(
            f"osp: {'yes' if resp.osp.holds else 'no'} ({resp.osp.status})"
        )
    if resp.spr is not None:
        detail = "" if resp.spr.failed is None else f" ({resp.spr.failed})"
        click.echo(f"spr: {'yes' if resp.spr.is_spr else 'no'}{detail}")


@cli.command("spr")
@click.option("--num", required=True, callback=_csv_floats)
@click.option("--den", required=True, callback=_csv_floats)
@click.option("--json", "as_json", is_flag=True, help="emit the JSON payload")
def spr_cmd(num, den, as_json):
    """Strict positive-realness test."""
    resp = handle_spr(SprRequest(num=num, den=den))
    if as_json:
        click.echo(resp.model_dump_json())
        return
    click.echo(f"num: {','.join(map(_fmt, resp.input.num))}")
    click.echo(f"den: {','.join(map(_fmt, resp.input.den))}")
    detail = "" if resp.failed is None else f" ({resp.failed})"
    click.echo(f"spr: {'yes' if resp.is_spr else 'no'}{detail}")


@cli.command("cascade")
@click.option("--spec", "spec_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="JSON file with the block list")
@click.option("--json", "as_json", is_flag=True, help="emit the JSON payload")
def cascade_cmd(spec_path, as_json):
    """Secant-condition check for a feedback cascade."""
    with open(spec_path) as fh:
        req = CascadeRequest.model_validate_json(fh.read())
    resp = handle_cascade(req)
    if as_json:
        click.echo(resp.model_dump_json())
        return
    click.echo(f"blocks: {len(resp.blocks)}")
    click.echo(f"gains: {', '.join(map(_fmt, resp.gains))}")
    rel = "<" if resp.passes else ">="
    word = "PASS" if resp.passes else "FAIL"
    line = (
        f"{word}: product {_fmt(resp.product_gain)} {rel} "
        f"threshold {_fmt_ext(resp.threshold)}"
    )
    if resp.boundary:
        line += " (at the boundary within tolerance)"
    click.echo(line)
    click.echo(f"margin = {_fmt_ext(resp.margin)}")
    if resp.closed_loop_stable is not None:
        click.echo(
            f"closed-loop: {'stable' if resp.closed_loop_stable else 'not stable'}"
        )


@cli.command("matrix")
@click.option("--alphas", required=True, callback=_csv_floats)
@click.option("--betas", required=True, callback=_csv_floats)
@click.option("--json", "as_json", is_flag=True, help="emit the JSON payload")
def matrix_cmd(alphas, betas, as_json):
    """Hurwitz test for the cyclic feedback matrix."""
    resp = handle_matrix(MatrixRequest(alphas=alphas, betas=betas))
    if as_json:
        click.echo(resp.model_dump_json())
        return
    click.echo(f"alphas: {', '.join(map(_fmt, resp.alphas))}")
    click.echo(f"betas: {', '.join(map(_fmt, resp.betas))}")
    click.echo(f"char_poly (ascending): {','.join(map(_fmt, resp.char_poly))}")
    click.echo(
        f"gain product = {_fmt(resp.gain_product)}, "
        f"threshold = {_fmt_ext(resp.threshold)}"
    )
    click.echo(f"verdict: {resp.verdict}")


@cli.command("simulate")
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="JSON file: blocks + input + dt + T")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="directory for u.csv, y<i>.csv, summary.json")
def simulate_cmd(scenario_path, out_dir):
    """Closed-loop simulation of a scenario file."""
    with open(scenario_path) as fh:
        scenario = ScenarioModel.model_validate_json(fh.read())
    resp = handle_simulate(SimulateRequest(scenario=scenario))
    os.makedirs(out_dir, exist_ok=True)
    u_path = os.path.join(out_dir, "u.csv")
    Signal(resp.input_signal.samples, resp.input_signal.dt).to_csv(u_path)
    click.echo(f"wrote {u_path}")
    for i, sig in enumerate(resp.outputs, start=1):
        y_path = os.path.join(out_dir, f"y{i}.csv")
        Signal(sig.samples, sig.dt).to_csv(y_path)
        click.echo(f"wrote {y_path}")
    summary_path = os.path.join(out_dir, "summary.json")
    with open(summary_path, "w") as fh:
        fh.write(json.dumps(json.loads(resp.summary.model_dump_json()), indent=2))
        fh.write("\n")
    click.echo(f"wrote {summary_path}")
    if resp.summary.diverged:
        click.echo(f"diverged: state blow-up at t = {_fmt(resp.summary.t_abort)}")
    else:
        click.echo(f"final |y_n| = {_fmt(abs(resp.summary.final_values[-1]))}")
    if resp.summary.max_gain_ratio is not None:
        click.echo(f"gain ratio = {_fmt(resp.summary.max_gain_ratio)}")


@cli.command("nyquist")
@click.option("--num", required=True, callback=_csv_floats)
@click.option("--den", required=True, callback=_csv_floats)
@click.option("--gamma", type=float, default=None,
              help="circle parameter (defaults to the computed secant gain)")
@click.option("--out", "out_base", required=True, type=click.Path(dir_okay=False),
              help="output base path; .csv and .svg are written")
def nyquist_cmd(num, den, gamma, out_base):
    """Nyquist curve CSV and circle-overlay SVG."""
    G = RationalTransfer(Polynomial(num), Polynomial(den))
    csv_path, svg_path = emit_nyquist(G, gamma, out_base)
    click.echo(f"wrote {csv_path}")
    click.echo(f"wrote {svg_path}")


def run(argv) -> int:
    """Parse and execute; returns the process exit code."""
    try:
        cli.main(args=list(argv), prog_name="secantkit", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 1
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except ArithmeticError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


def entry() -> None:
    sys.exit(run(sys.argv[1:]))
