"""HTTP front end for the live contest.

Every mutation funnels through one lock-serialized append to the event
log; reads recompute from the folded state. Visitor identity is a
128-bit cookie issued on first landing.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
import re
import secrets
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse, RedirectResponse
from pydantic import BaseModel

from .analytics import build_table1, summary_report, tests_report
from .events import EventLog, replay, state_hash
from .exports import UnknownFormatError, export_graph
from .graph import STAFF_ROOT_ID
from .payouts import (
    PayoutError,
    PayoutSchedule,
    StaffWinnerError,
    compute_payouts,
    ledger_bound_check,
    ledger_to_dict,
)

COOKIE_NAME = "snp_visitor"
TOKEN_RE = re.compile(r"^[A-Za-z0-9_-]{10,128}$")
EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")
COUNTRY_RE = re.compile(r"^[A-Za-z]{2}$")


@dataclass
class ServiceConfig:
    salt: str = "dev-salt"
    cookie_ttl_days: int = 365
    landing_url: str = "/"
    winner_award: str = "10000"
    chain_base: str = "1000"
    decay: str = "0.5"
    min_unit: str = "0.01"
    static_dir: Optional[str] = None

    @classmethod
    def from_env(cls, salt_env: str = "SNP_SALT") -> "ServiceConfig":
        return cls(
            salt=os.environ.get(salt_env, "dev-salt"),
            cookie_ttl_days=int(os.environ.get("SNP_COOKIE_TTL_DAYS", "365")),
            landing_url=os.environ.get("SNP_LANDING_URL", "/"),
            winner_award=os.environ.get("SNP_WINNER_AWARD", "10000"),
            chain_base=os.environ.get("SNP_CHAIN_BASE", "1000"),
            decay=os.environ.get("SNP_DECAY", "0.5"),
            min_unit=os.environ.get("SNP_MIN_UNIT", "0.01"),
            static_dir=os.environ.get("SNP_STATIC_DIR"),
        )

    def default_schedule(self) -> PayoutSchedule:
        return PayoutSchedule.from_major_units(
            winner_award=self.winner_award,
            chain_base=self.chain_base,
            decay=self.decay,
            min_unit=self.min_unit,
        )


class EngineStore:
    """Event log plus folded state behind a single writer lock."""

    def __init__(self, log_path: Union[str, Path]):
        self.lock = threading.RLock()
        self.log = EventLog(log_path)  # validates any existing log
        self.graph = replay(log_path)

    def append(self, etype: str, payload: dict) -> None:
        from .events import apply_event

        with self.lock:
            rec = self.log.append(etype, payload)
            apply_event(self.graph, rec)

    def close(self) -> None:
        self.log.close()


class LinkRequest(BaseModel):
    email: str
    consent: bool = True
    staff: bool = False


class PayoutPreviewRequest(BaseModel):
    winners: list[str]
    schedule: Optional[dict] = None


_LANDING_FALLBACK = """<!doctype html>
<html><head><title>Referral Contest</title></head>
<body>
<h1>Referral contest</h1>
<p>Enter your email to get a unique share link; if someone you bring in
wins, everyone along the chain is rewarded.</p>
<p>POST /api/links with {"email": ...} using your visitor cookie.</p>
</body></html>"""


def create_app(store: EngineStore, config: Optional[ServiceConfig] = None) -> FastAPI:
    cfg = config or ServiceConfig()
    app = FastAPI(title="referral-contest", version="0.1.0")
    app.state.store = store
    app.state.config = cfg

    def email_hash(email: str) -> str:
        return hmac.new(cfg.salt.encode(), email.strip().lower().encode(),
                        hashlib.sha256).hexdigest()

    def visitor_of(request: Request) -> Optional[str]:
        return request.cookies.get(COOKIE_NAME)

    def require_visitor(request: Request) -> str:
        vid = visitor_of(request)
        if not vid:
            raise HTTPException(status_code=400, detail="visitor cookie required; visit the landing page first")
        return vid

    def set_cookie(response: Response, vid: str) -> None:
        response.set_cookie(
            COOKIE_NAME, vid,
            max_age=cfg.cookie_ttl_days * 86400,
            httponly=True, samesite="lax",
        )

    @app.get("/", response_class=HTMLResponse)
    def landing(request: Request):
        page = _LANDING_FALLBACK
        if cfg.static_dir:
            index = Path(cfg.static_dir) / "index.html"
            if index.exists():
                page = index.read_text(encoding="utf-8")
        response = HTMLResponse(page)
        if not visitor_of(request):
            set_cookie(response, secrets.token_urlsafe(16))
        return response

    @app.get("/r/{token}")
    def redirect(token: str, request: Request, country: Optional[str] = None):
        if not TOKEN_RE.match(token):
            raise HTTPException(status_code=400, detail="malformed token")
        if country is not None and not COUNTRY_RE.match(country):
            raise HTTPException(status_code=400, detail="country must be a two-letter code")
        store: EngineStore = app.state.store
        with store.lock:
            if token not in store.graph.tokens:
                raise HTTPException(status_code=404, detail="unknown token")
            vid = visitor_of(request)
            new_visitor = vid is None
            if new_visitor:
                vid = secrets.token_urlsafe(16)
            payload = {"token": token, "visitor": vid}
            if country:
                payload["country"] = country.upper()
            store.append("click", payload)
        response = RedirectResponse(cfg.landing_url, status_code=302)
        if new_visitor:
            set_cookie(response, vid)
        return response

    @app.post("/api/links")
    def create_link(body: LinkRequest, request: Request):
        vid = require_visitor(request)
        email = body.email.strip()
        if not EMAIL_RE.match(email):
            raise HTTPException(status_code=422, detail="invalid email address")
        store: EngineStore = app.state.store
        eh = email_hash(email)
        with store.lock:
            existing = store.graph.find_token(vid, eh)
            if existing is not None:
                token = existing
            else:
                token = secrets.token_urlsafe(16)
                while token in store.graph.tokens:
                    token = secrets.token_urlsafe(16)
                store.append(
                    "link_created",
                    {"token": token, "owner_visitor": vid, "email_hash": eh,
                     "staff": body.staff, "consent": body.consent},
                )
        share_url = str(request.base_url).rstrip("/") + f"/r/{token}"
        return {"token": token, "share_url": share_url}

    @app.post("/api/members")
    def register(request: Request):
        vid = require_visitor(request)
        store: EngineStore = app.state.store
        with store.lock:
            p = store.graph.participants.get(vid)
            if p is not None and p.member_id is not None:
                raise HTTPException(status_code=409, detail="already a member")
            member_id = f"m-{len(store.graph.member_index) + 1:06d}"
            store.append("member_registered", {"visitor": vid, "member": member_id})
        return {"member_id": member_id}

    @app.get("/api/participants/{participant_id}/classification")
    def classification(participant_id: str):
        store: EngineStore = app.state.store
        with store.lock:
            g = store.graph
            pid = g.member_index.get(participant_id, participant_id)
            if pid not in g.participants:
                raise HTTPException(status_code=404, detail="unknown participant")
            c = g.classify(pid)
            return {
                "participant_id": pid,
                "kind": c.kind.value,
                "degrees_from_established": c.degrees_from_established,
            }

    @app.post("/api/payouts/preview")
    def payout_preview(body: PayoutPreviewRequest):
        store: EngineStore = app.state.store
        overrides = body.schedule or {}
        defaults = app.state.config
        try:
            schedule = PayoutSchedule.from_major_units(
                winner_award=overrides.get("winner_award", defaults.winner_award),
                chain_base=overrides.get("chain_base", defaults.chain_base),
                decay=overrides.get("decay", defaults.decay),
                min_unit=overrides.get("min_unit", defaults.min_unit),
                max_depth=overrides.get("max_depth"),
            )
        except (PayoutError, ValueError, ZeroDivisionError) as exc:
            raise HTTPException(status_code=422, detail=f"bad schedule: {exc}")
        with store.lock:
            g = store.graph
            winners = []
            for wid in body.winners:
                pid = g.member_index.get(wid, wid)
                p = g.participants.get(pid)
                if p is None or p.member_id is None:
                    raise HTTPException(status_code=404, detail=f"unknown member {wid!r}")
                if p.is_staff or pid == STAFF_ROOT_ID:
                    raise HTTPException(status_code=409, detail=f"staff participant {wid!r} cannot win")
                winners.append(pid)
            try:
                ledger = compute_payouts(winners, g, schedule)
            except StaffWinnerError as exc:
                raise HTTPException(status_code=409, detail=str(exc))
            except PayoutError as exc:
                raise HTTPException(status_code=404, detail=str(exc))
            doc = ledger_to_dict(ledger)
            doc["preview"] = True
            doc["within_bound"] = ledger_bound_check(ledger, winners, schedule)
            return doc

    @app.get("/api/stats/{kind}")
    def stats(kind: str):
        store: EngineStore = app.state.store
        with store.lock:
            g = store.graph
            if kind == "table1":
                return build_table1(g).to_dict()
            if kind == "tests":
                return tests_report(g)
            if kind == "summary":
                report = summary_report(g)
                report["state_hash"] = state_hash(g)
                return report
        raise HTTPException(status_code=404, detail=f"unknown stats kind {kind!r}")

    @app.get("/api/network")
    def network(format: str = "json"):
        store: EngineStore = app.state.store
        with store.lock:
            try:
                doc = export_graph(store.graph, format)
            except UnknownFormatError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        if format == "json":
            return JSONResponse(content=json.loads(doc))
        media = "text/vnd.graphviz" if format == "dot" else "application/graphml+xml"
        return PlainTextResponse(doc, media_type=media)

    return app


def build_app(events_path: Union[str, Path], config: Optional[ServiceConfig] = None) -> FastAPI:
    return create_app(EngineStore(events_path), config)
