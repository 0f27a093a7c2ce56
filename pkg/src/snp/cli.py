"""Command-line entry points: serve, analyze, export, payout, simulate, fixture."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import click

from .analytics import build_table1, summary_report, tests_report
from .events import replay, state_hash
from .exports import FORMATS, export_graph
from .payouts import PayoutSchedule, compute_payouts, ledger_to_csv, ledger_to_dict
from .simulate import GraphSpec, IncentiveModel, run_trials


@click.group()
def main():
    """Referral-contest engine."""


@main.command()
@click.option("--events", "events_path", required=True, type=click.Path())
@click.option("--port", default=None, type=int,
              help="Listen port (default: $SNP_PORT or 8000).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--salt-env", default="SNP_SALT", show_default=True,
              help="Environment variable holding the email-hash salt.")
@click.option("--static", "static_dir", default=None, type=click.Path(exists=True),
              help="Directory with a built web UI to serve at /.")
def serve(events_path, port, host, salt_env, static_dir):
    """Run the contest HTTP service against an append-only event log."""
    import os

    import uvicorn

    from .service import ServiceConfig, build_app

    if port is None:
        port = int(os.environ.get("SNP_PORT", "8000"))
    config = ServiceConfig.from_env(salt_env)
    if static_dir:
        config.static_dir = static_dir
    app = build_app(events_path, config)
    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")
        dist = Path(static_dir) / "dist"
        if dist.is_dir():
            # the landing page served at "/" references ./dist/ assets
            app.mount("/dist", StaticFiles(directory=dist), name="dist")
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.argument("events_path", type=click.Path(exists=True))
@click.option("--report", type=click.Choice(["table1", "tests", "summary"]), default="summary",
              show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text",
              show_default=True)
def analyze(events_path, report, fmt):
    """Replay a log and print a report."""
    graph = replay(events_path)
    if report == "table1":
        t1 = build_table1(graph)
        click.echo(json.dumps(t1.to_dict(), indent=2) if fmt == "json" else t1.to_text())
        return
    doc = tests_report(graph) if report == "tests" else summary_report(graph)
    if report == "summary":
        doc["state_hash"] = state_hash(graph)
    if fmt == "json":
        click.echo(json.dumps(doc, indent=2))
    else:
        for key, value in doc.items():
            click.echo(f"{key}: {json.dumps(value) if isinstance(value, dict) else value}")


@main.command()
@click.argument("events_path", type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(list(FORMATS)), required=True)
@click.option("--out", type=click.Path(), default=None, help="Output file (default stdout).")
def export(events_path, fmt, out):
    """Export the referral network as dot, graphml, or json."""
    doc = export_graph(replay(events_path), fmt)
    if out:
        Path(out).write_text(doc, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(doc, nl=False)


@main.command()
@click.argument("events_path", type=click.Path(exists=True))
@click.option("--winner", "winners", multiple=True, required=True,
              help="Winner participant or member id (repeatable).")
@click.option("--grand", default="10000", show_default=True, help="Winner award, major units.")
@click.option("--base", default="1000", show_default=True, help="Chain reward at distance 1.")
@click.option("--decay", default="0.5", show_default=True)
@click.option("--min-unit", default="0.01", show_default=True)
@click.option("--max-depth", default=None, type=int)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
def payout(events_path, winners, grand, base, decay, min_unit, max_depth, fmt):
    """Compute the payout ledger for declared winners."""
    graph = replay(events_path)
    schedule = PayoutSchedule.from_major_units(
        winner_award=grand, chain_base=base, decay=decay, min_unit=min_unit,
        max_depth=max_depth,
    )
    resolved = [graph.member_index.get(w, w) for w in winners]
    ledger = compute_payouts(resolved, graph, schedule)
    if fmt == "csv":
        click.echo(ledger_to_csv(ledger), nl=False)
    else:
        click.echo(json.dumps(ledger_to_dict(ledger), indent=2))


@main.command()
@click.option("--model", type=click.Choice(["ws", "ba"]), default="ws", show_default=True)
@click.option("--n", default=5000, show_default=True, type=int)
@click.option("--k", default=6, show_default=True, type=int, help="ws: neighbors per node (even).")
@click.option("--beta", default=0.1, show_default=True, type=float, help="ws: rewiring probability.")
@click.option("--m", default=2, show_default=True, type=int, help="ba: edges per new node.")
@click.option("--incentive", type=click.Choice(["flat", "recursive", "both"]), default="both",
              show_default=True)
@click.option("--p-click", default=0.5, show_default=True, type=float)
@click.option("--p-join", default=0.1, show_default=True, type=float)
@click.option("--base-share", default=0.15, show_default=True, type=float)
@click.option("--decay", default="0.5", show_default=True)
@click.option("--p-author", default=0.0, show_default=True, type=float,
              help="Probability a recruit authors a proposal.")
@click.option("--p-finalist", default=0.0, show_default=True, type=float,
              help="Base probability an authored proposal reaches finalist.")
@click.option("--quality-depth-gain", default=0.0, show_default=True, type=float,
              help="Added finalist probability per extra degree of separation.")
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--trials", default=200, show_default=True, type=int)
@click.option("--seeds-per-trial", default=10, show_default=True, type=int)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--write-logs/--no-write-logs", default=True, show_default=True,
              help="Also write each trial's event log.")
def simulate(model, n, k, beta, m, incentive, p_click, p_join, base_share, decay,
             p_author, p_finalist, quality_depth_gain, seed, trials,
             seeds_per_trial, out_dir, write_logs):
    """Run cascade trials and write summary.csv (and per-trial event logs)."""
    from fractions import Fraction

    from .fixtures import Fixture
    from .simulate import ProposalModel

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if model == "ws":
        spec = GraphSpec("small_world", n, k=k, beta=beta, seed=seed)
    else:
        spec = GraphSpec("scale_free", n, m=m, seed=seed)
    kinds = ["flat", "recursive"] if incentive == "both" else [incentive]
    proposals = None
    if p_author > 0:
        proposals = ProposalModel(p_author=p_author, p_finalist=p_finalist,
                                  depth_gain=quality_depth_gain)

    rows = []
    for kind in kinds:
        inc = IncentiveModel(kind, p_click=p_click, p_join=p_join,
                             base_share=base_share, decay=Fraction(str(decay)))

        def save(i, res, kind=kind):
            if write_logs:
                Fixture(records=res.events).write(out / f"trial_{kind}_{i:04d}.jsonl")

        for row in run_trials(spec, inc, trials, seeds_per_trial, seed,
                              proposals=proposals, on_result=save):
            rows.append((row.trial, row.incentive, row.max_depth,
                         row.recruits, row.indirect_recruits))

    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "incentive", "max_depth", "recruits", "indirect_recruits"])
        writer.writerows(rows)
    click.echo(f"wrote {out / 'summary.csv'} ({len(rows)} rows)")


@main.command()
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--scale", type=click.Choice(["full", "mini", "figure1"]), default="mini",
              show_default=True)
def fixture(out_path, scale):
    """Write a synthetic demo event log."""
    from .fixtures import contest_fixture, figure1_fixture

    fx = figure1_fixture() if scale == "figure1" else contest_fixture(scale)
    fx.write(out_path)
    click.echo(f"wrote {out_path} ({len(fx.records)} events)")


if __name__ == "__main__":
    main()
