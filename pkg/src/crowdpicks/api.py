"""HTTP API over the game service.

Thin JSON layer: every response body carries the sequence number of the log
snapshot it was derived from, so clients can detect staleness and skip
redundant re-renders. All game arithmetic lives in the engine modules; this
module only shapes values.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import (
    DuplicatePlayerError,
    DuplicatePredictionError,
    NoQuoteError,
    UnknownInstrumentError,
    UnknownPlayerError,
)
from .model import Orientation, Prediction, format_timestamp
from .ranking import LeaderboardEntry, PlayerStats
from .scoring import PredictionScore
from .service import GameService, RatedStock

__all__ = ["create_app", "SubmissionRequest"]


class SubmissionRequest(BaseModel):
    player_id: str
    stock_ticker: str
    index_ticker: str
    orientation: Literal["outperform", "underperform"]


def _prediction_json(p: Prediction, score: PredictionScore | None = None) -> dict:
    body = {
        "id": p.id,
        "player_id": p.player_id,
        "stock_ticker": p.stock_ticker,
        "index_ticker": p.index_ticker,
        "orientation": p.orientation.value,
        "entered_at": format_timestamp(p.entered_at),
        "stock_entry_value": p.stock_entry_value,
        "index_entry_value": p.index_entry_value,
    }
    if score is not None:
        body["score"] = {
            "stock_gain": score.stock_gain,
            "index_gain": score.index_gain,
            "score": score.score,
            "mature": score.mature,
            "as_of": format_timestamp(score.as_of),
        }
    return body


def _entry_json(entry: LeaderboardEntry, name: str | None) -> dict:
    return {
        "player_id": entry.player_id,
        "name": name,
        "score_percentile": entry.score_percentile,
        "accuracy_percentile": entry.accuracy_percentile,
        "raw_rating": entry.raw_rating,
        "rating_percentile": entry.rating_percentile,
    }


def _stats_json(stats: PlayerStats) -> dict:
    return {
        "player_id": stats.player_id,
        "prediction_count": stats.prediction_count,
        "positive_count": stats.positive_count,
        "accuracy": stats.accuracy,
        "total_score": stats.total_score,
        "counted_predictions": stats.counted_predictions,
        "weighted_accuracy": stats.weighted_accuracy,
        "bayesian_accuracy": stats.bayesian_accuracy,
    }


def _rated_stock_json(rated: RatedStock) -> dict:
    r = rated.rating
    return {
        "ticker": r.ticker,
        "qualified": r.qualified,
        "prediction_count": r.prediction_count,
        "outperform_mass": r.outperform_mass,
        "underperform_mass": r.underperform_mass,
        "score": r.score,
        "percentile": r.percentile,
        "gain_1y": rated.gain_1y,
        "gain_1m": rated.gain_1m,
    }


def create_app(service: GameService, *, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="crowdpicks", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def error_response(status: int):
        def handler(request: Request, exc: Exception) -> JSONResponse:
            return JSONResponse(status_code=status, content={"error": str(exc)})

        return handler

    for error_class in (UnknownPlayerError, UnknownInstrumentError):
        app.add_exception_handler(error_class, error_response(404))
    for error_class in (DuplicatePredictionError, DuplicatePlayerError, NoQuoteError):
        app.add_exception_handler(error_class, error_response(409))
    app.add_exception_handler(ValueError, error_response(400))

    @app.get("/api/instruments")
    def instruments() -> dict:
        return {
            "seq": service.seq,
            "instruments": [
                {"ticker": i.ticker, "kind": i.kind.value} for i in service.instruments()
            ],
        }

    @app.post("/api/predictions", status_code=201)
    def submit(request: SubmissionRequest) -> dict:
        prediction = service.submit_prediction(
            player_id=request.player_id,
            stock_ticker=request.stock_ticker,
            index_ticker=request.index_ticker,
            orientation=Orientation(request.orientation),
        )
        return {"seq": service.seq, "prediction": _prediction_json(prediction)}

    @app.get("/api/predictions")
    def predictions(player_id: str | None = None) -> dict:
        picks = service.predictions(player_id)
        return {
            "seq": service.seq,
            "predictions": [_prediction_json(p, s) for p, s in picks],
        }

    @app.get("/api/leaderboard")
    def leaderboard() -> dict:
        entries = service.leaderboard()
        return {
            "seq": service.seq,
            "entries": [_entry_json(e, service.player_name(e.player_id)) for e in entries],
        }

    @app.get("/api/stocks/ratings")
    def stock_ratings() -> dict:
        return {
            "seq": service.seq,
            "ratings": [_rated_stock_json(r) for r in service.stock_ratings()],
        }

    @app.get("/api/players/{player_id}")
    def player(player_id: str) -> dict:
        stats, entry = service.player_view(player_id)
        name = service.player_name(player_id)
        return {
            "seq": service.seq,
            "player": {
                **_stats_json(stats),
                "name": name,
                "entry": None if entry is None else _entry_json(entry, name),
            },
        }

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
