"""Command line entry points: serve, ingest, replay, report, register, simulate."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click
import uvicorn

from .api import create_app
from .errors import CrowdpicksError
from .events import EventStore
from .marketdata import parse_price_csv
from .model import DEFAULT_CONFIG, Config, Kind, parse_config
from .service import GameService, compute_ratings
from .simulate import PICKS_PER_PLAYER, SimulationSpec, run_simulation
from .stocks import render_report_csv, report_top

log = logging.getLogger(__name__)


def _load_config(path: Path | None) -> Config | None:
    if path is None:
        return None
    return parse_config(path.read_text(encoding="utf-8"))


@click.group()
@click.option(
    "--log",
    "log_path",
    type=click.Path(path_type=Path),
    default=Path("events.log"),
    show_default=True,
    help="Event log file (the system of record).",
)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Config file. Write commands record it in the log; read commands use it as an override.",
)
@click.pass_context
def main(ctx: click.Context, log_path: Path, config_path: Path | None) -> None:
    """Crowd-sourced stock prediction game."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    ctx.obj = {"log_path": log_path, "config_path": config_path}


def _fail(exc: Exception) -> None:
    raise click.ClickException(str(exc))


def _write_service(ctx: click.Context, *, durable: bool = True) -> GameService:
    """Service for commands that append; an explicit --config that differs
    from the log's effective config is recorded as a config change event."""
    store = EventStore(ctx.obj["log_path"], durable=durable)
    service = GameService(store)
    override = _load_config(ctx.obj["config_path"])
    if override is not None and override != service.config:
        service.change_config(override)
    return service


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option(
    "--ui",
    "ui_dir",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    default=None,
    help="Directory of built web UI assets to serve at /.",
)
@click.option(
    "--snapshot",
    "snapshot_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Snapshot file to resume from when present.",
)
@click.pass_context
def serve(
    ctx: click.Context, host: str, port: int, ui_dir: Path | None, snapshot_path: Path | None
) -> None:
    """Run the HTTP API (and optionally the web UI)."""
    try:
        store = EventStore(ctx.obj["log_path"])
        service = GameService(store, snapshot_path=snapshot_path)
        override = _load_config(ctx.obj["config_path"])
        if override is not None and override != service.config:
            service.change_config(override)
    except CrowdpicksError as exc:
        _fail(exc)
    app = create_app(service, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.argument("csv_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--kind",
    type=click.Choice([k.value for k in Kind]),
    default=Kind.STOCK.value,
    show_default=True,
    help="Instrument kind the rows register on first sight.",
)
@click.pass_context
def ingest(ctx: click.Context, csv_file: Path, kind: str) -> None:
    """Append price observations from a ticker,timestamp,value CSV."""
    try:
        points = parse_price_csv(csv_file.read_text(encoding="utf-8"))
        service = _write_service(ctx)
        count = service.ingest_prices(points, Kind(kind))
    except CrowdpicksError as exc:
        _fail(exc)
    click.echo(f"ingested {count} price points from {csv_file}")


@main.command()
@click.option("--id", "player_id", required=True, help="Opaque player id.")
@click.option("--name", required=True, help="Display name.")
@click.pass_context
def register(ctx: click.Context, player_id: str, name: str) -> None:
    """Register a player."""
    try:
        service = _write_service(ctx)
        player = service.register_player(player_id, name)
    except CrowdpicksError as exc:
        _fail(exc)
    click.echo(f"registered {player.id} ({player.name})")


@main.command()
@click.option("--up-to", "up_to", type=int, default=None, help="Stop after this sequence number.")
@click.pass_context
def replay(ctx: click.Context, up_to: int | None) -> None:
    """Fold the log into state and print a summary. Reads only."""
    try:
        store = EventStore(ctx.obj["log_path"])
        state = store.replay(up_to=up_to)
    except CrowdpicksError as exc:
        _fail(exc)
    stocks = sum(1 for k in state.kinds.values() if k is Kind.STOCK)
    indexes = sum(1 for k in state.kinds.values() if k is Kind.INDEX)
    click.echo(f"events:      {state.last_seq}")
    click.echo(f"as of:       {state.last_at.isoformat() if state.last_at else '-'}")
    click.echo(f"players:     {len(state.players)}")
    click.echo(f"predictions: {len(state.predictions)}")
    click.echo(f"instruments: {stocks} stocks, {indexes} indexes")


@main.command()
@click.option("--top", "top_n", type=int, default=10, show_default=True, help="Rows to emit.")
@click.pass_context
def report(ctx: click.Context, top_n: int) -> None:
    """Emit the top rated stocks as CSV. Reads only."""
    try:
        store = EventStore(ctx.obj["log_path"])
        state = store.replay()
        override = _load_config(ctx.obj["config_path"])
        view = compute_ratings(state, config=override)
        history = {
            ticker: state.series(ticker)
            for ticker, kind in state.kinds.items()
            if kind is Kind.STOCK
        }
        rows = report_top(view.stock_ratings, history, top_n, state.last_at)
    except CrowdpicksError as exc:
        _fail(exc)
    click.echo(render_report_csv(rows), nl=False)


@main.command()
@click.option("--players", required=True, type=int)
@click.option("--stocks", required=True, type=int)
@click.option("--days", required=True, type=int)
@click.option("--seed", required=True, type=int, help="RNG seed; identical seeds give identical logs.")
@click.option("--imitators", type=int, default=0, show_default=True)
@click.option("--lag", "lag_days", type=int, default=1, show_default=True)
@click.option(
    "--picks-per-player",
    type=float,
    default=PICKS_PER_PLAYER,
    show_default=True,
    help="Mean picks per regular player.",
)
@click.pass_context
def simulate(
    ctx: click.Context,
    players: int,
    stocks: int,
    days: int,
    seed: int,
    imitators: int,
    lag_days: int,
    picks_per_player: float,
) -> None:
    """Generate a synthetic game into a fresh event log."""
    log_path: Path = ctx.obj["log_path"]
    if log_path.exists() and log_path.stat().st_size > 0:
        _fail(ValueError(f"{log_path} already has events; simulate needs a fresh log"))
    spec = SimulationSpec(
        players=players,
        stocks=stocks,
        days=days,
        seed=seed,
        imitators=imitators,
        lag_days=lag_days,
        picks_per_player=picks_per_player,
    )
    config = _load_config(ctx.obj["config_path"]) or DEFAULT_CONFIG
    try:
        with EventStore(log_path, durable=False) as store:
            summary = run_simulation(store, spec, config)
    except (CrowdpicksError, ValueError) as exc:
        _fail(exc)
    click.echo(
        f"simulated {summary.predictions} picks by {summary.players} players"
        f" (+{summary.imitators} imitators) on {summary.stocks} stocks"
        f" over {summary.days} days; {summary.events} events"
    )


if __name__ == "__main__":
    main(prog_name="crowdpicks")
