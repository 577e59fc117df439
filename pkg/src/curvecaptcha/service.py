"""Challenge/verify service: single-use, time-limited challenges behind an
HTTP API. Curve geometry never leaves the process; clients only ever see the
encoded image.

The store is in-memory and lock-protected: check-expiry-and-consume is one
atomic step, so concurrent submissions of the same id reach the evaluation
pipeline at most once. A logical clock is injected for testability.
"""

from __future__ import annotations

import base64
import secrets
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, Field

from .background import GlyphDatabase, build_synthetic_database
from .challenge import VARIANT_LONG, VARIANTS, assemble_challenge
from .curve import CanvasSpec, DEFAULT_CANVAS
from .verify import Reason, Trace, Verdict, VerifyConfig, evaluate, evaluate_short

DEFAULT_TTL_SECONDS = 60.0
DEFAULT_MAX_RECORDS = 10_000

Clock = Callable[[], float]


class StoreCapacityError(RuntimeError):
    """The challenge store is full; the caller should retry later."""


@dataclass
class ChallengeRecord:
    id: str
    variant: str
    curves: tuple[np.ndarray, ...]
    canvas: CanvasSpec
    created_at: float
    expires_at: float
    cfg: VerifyConfig
    consumed: bool = False


class ChallengeStore:
    """Keyed challenge records with atomic consume and bounded memory.

    Records that have been expired for longer than one TTL are purged on
    every mutating call, so nothing outlives 2x TTL.
    """

    def __init__(self, ttl_seconds: float = DEFAULT_TTL_SECONDS, max_records: int = DEFAULT_MAX_RECORDS):
        if ttl_seconds <= 0:
            raise ValueError("ttl_seconds must be positive")
        self.ttl_seconds = ttl_seconds
        self.max_records = max_records
        self._records: dict[str, ChallengeRecord] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    def _purge_locked(self, now: float) -> None:
        cutoff = now - self.ttl_seconds
        stale = [k for k, r in self._records.items() if r.expires_at < cutoff]
        for k in stale:
            del self._records[k]

    def put(self, record: ChallengeRecord, now: float) -> None:
        with self._lock:
            self._purge_locked(now)
            if len(self._records) >= self.max_records:
                raise StoreCapacityError(f"store holds {self.max_records} live challenges")
            self._records[record.id] = record

    def consume(self, challenge_id: str, now: float) -> tuple[Optional[ChallengeRecord], Reason]:
        """Atomically claim a record for its single evaluation.

        Unknown and already-consumed ids are indistinguishable to callers;
        expiry is checked inside the same critical section.
        """
        with self._lock:
            self._purge_locked(now)
            record = self._records.get(challenge_id)
            if record is None or record.consumed:
                return None, Reason.CONSUMED
            if now >= record.expires_at:
                record.consumed = True
                return None, Reason.EXPIRED
            record.consumed = True
            return record, Reason.OK


@dataclass(frozen=True)
class ServiceConfig:
    ttl_seconds: float = DEFAULT_TTL_SECONDS
    default_variant: str = VARIANT_LONG
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    canvas: CanvasSpec = DEFAULT_CANVAS
    max_records: int = DEFAULT_MAX_RECORDS
    master_seed: Optional[int] = None  # testing only; production uses OS entropy


class CaptchaService:
    """Protocol core shared by the HTTP layer, the CLI, and tests."""

    def __init__(
        self,
        db: Optional[GlyphDatabase] = None,
        config: ServiceConfig = ServiceConfig(),
        clock: Clock = time.time,
    ):
        if config.default_variant not in VARIANTS:
            raise ValueError(f"unknown variant {config.default_variant!r}")
        self.config = config
        self.clock = clock
        seed_seq = np.random.SeedSequence(config.master_seed)
        self._seed_lock = threading.Lock()
        self._seed_seq = seed_seq
        if db is None:
            db = build_synthetic_database(np.random.default_rng(self._next_seed()))
        self.db = db
        self.store = ChallengeStore(config.ttl_seconds, config.max_records)

    def _next_seed(self) -> np.random.SeedSequence:
        with self._seed_lock:
            (child,) = self._seed_seq.spawn(1)
        return child

    def create_challenge(self, variant: Optional[str] = None) -> dict:
        """Assemble and store a fresh challenge; return the client payload.

        The payload carries the encoded image and bookkeeping fields only,
        never curve coordinates.
        """
        variant = variant or self.config.default_variant
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        rng = np.random.default_rng(self._next_seed())
        assembled = assemble_challenge(rng, self.db, variant, self.config.canvas, render=True)
        now = self.clock()
        record = ChallengeRecord(
            id=secrets.token_urlsafe(16),
            variant=variant,
            curves=assembled.curves,
            canvas=assembled.canvas,
            created_at=now,
            expires_at=now + self.config.ttl_seconds,
            cfg=self.config.verify,
        )
        self.store.put(record, now)
        return {
            "id": record.id,
            "image_base64": base64.b64encode(assembled.image.encoded_bytes).decode("ascii"),
            "width": assembled.canvas.width,
            "height": assembled.canvas.height,
            "variant": variant,
            "expires_at": record.expires_at,
        }

    def submit_trace(self, challenge_id: str, trace: Trace) -> Verdict:
        """Adjudicate one trace; the challenge is unusable afterwards."""
        record, reason = self.store.consume(challenge_id, self.clock())
        if record is None:
            return Verdict(passed=False, reason=reason)
        if record.variant == VARIANT_LONG:
            return evaluate(record.curves[0], trace, record.cfg, record.canvas)
        return evaluate_short(record.curves, trace, record.cfg, record.canvas)

    def refresh_challenge(self, old_id: str, variant: Optional[str] = None) -> dict:
        """Invalidate the old challenge (if any) and issue a fresh one with a
        new background and curve."""
        self.store.consume(old_id, self.clock())
        return self.create_challenge(variant)


class ChallengeRequest(BaseModel):
    variant: Optional[str] = None


class WirePoint(BaseModel):
    x: float
    y: float
    t: float = 0.0


class VerifyRequest(BaseModel):
    id: str
    strokes: list[list[WirePoint]] = Field(min_length=1)


def create_app(service: CaptchaService):
    """FastAPI wrapper exposing the challenge/verify protocol."""
    from fastapi import FastAPI, HTTPException
    from fastapi.responses import JSONResponse

    from .traceio import TraceFormatError, trace_from_strokes

    app = FastAPI(title="curvecaptcha", version="0.1.0")

    @app.get("/v1/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/v1/challenge", status_code=201)
    def create_challenge(req: ChallengeRequest):
        try:
            return service.create_challenge(req.variant)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except StoreCapacityError as exc:
            raise HTTPException(status_code=503, detail=str(exc))

    @app.post("/v1/challenge/{challenge_id}/refresh", status_code=201)
    def refresh_challenge(challenge_id: str):
        try:
            return service.refresh_challenge(challenge_id)
        except StoreCapacityError as exc:
            raise HTTPException(status_code=503, detail=str(exc))

    @app.post("/v1/verify")
    def verify(req: VerifyRequest):
        try:
            trace = trace_from_strokes(
                [[{"x": p.x, "y": p.y, "t": p.t} for p in stroke] for stroke in req.strokes]
            )
        except TraceFormatError as exc:
            # Malformed documents are protocol errors and do not consume.
            raise HTTPException(status_code=422, detail=str(exc))
        verdict = service.submit_trace(req.id, trace)
        return JSONResponse(content=verdict.to_dict())

    return app
