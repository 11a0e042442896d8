"""HTTP JSON service exposing generation, evaluation, and corpus access.

Stateless per request except a bounded in-memory LRU of stage transcripts,
so clients can fetch the raw prompt/completion text behind a generation.
Request bodies are capped by Content-Length; error responses always carry
{"error": str, "diagnostics": [str]}.
"""

from __future__ import annotations

import json
import os
import socket
import threading
import uuid
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .client import (
    ClientError,
    HttpProvider,
    MockProvider,
    Provider,
    ProviderConfig,
    run_pipeline,
)
from .corpus import Corpus, CorpusItem, bundled_goldens, load_corpus
from .dotio import DigraphSyntaxError, ParseMode, emit_digraph, emit_render_dot, parse_digraph
from .evaluate import DEFAULT_THRESHOLD, evaluate
from .model import CausalLoopDiagram, enumerate_loops
from .prompting import NotEnoughExemplars, PreconditionViolation, Strategy

__all__ = [
    "ServiceConfig",
    "BadConfig",
    "AddressInUse",
    "TranscriptStore",
    "load_service_config",
    "create_app",
    "serve",
]


class BadConfig(Exception):
    pass


class AddressInUse(Exception):
    pass


@dataclass(frozen=True)
class ServiceConfig:
    listen: str = "127.0.0.1:8000"
    provider: str = "mock"  # "mock" | "live"
    fixtures_dir: str | None = None
    endpoint: str = ""
    model_id: str = ""
    api_key_env: str = "LLM_API_KEY"
    corpus_path: str | None = None  # None → bundled goldens
    threshold: float = DEFAULT_THRESHOLD
    shots: int = 3
    max_body_bytes: int = 1_000_000
    transcript_capacity: int = 256

    def __post_init__(self) -> None:
        if not 0 < self.threshold <= 1:
            raise BadConfig("threshold must be in (0, 1]")
        if self.shots < 0:
            raise BadConfig("shot count must be >= 0")
        if self.provider not in ("mock", "live"):
            raise BadConfig(f"unknown provider kind {self.provider!r}")


CONFIG_ENV_VAR = "CLDFORGE_CONFIG"


def load_service_config(path: str | None = None, **overrides) -> ServiceConfig:
    """Build config from an optional JSON file plus keyword overrides.

    The file defaults to $CLDFORGE_CONFIG when set; explicit overrides win.
    """
    path = path or os.environ.get(CONFIG_ENV_VAR) or None
    data: dict = {}
    if path:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise BadConfig(f"cannot load config file {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise BadConfig("config file must hold a JSON object")
        unknown = set(data) - {f for f in ServiceConfig.__dataclass_fields__}
        if unknown:
            raise BadConfig(f"unknown config field {sorted(unknown)[0]!r}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ServiceConfig(**data)
    except TypeError as exc:
        raise BadConfig(str(exc)) from exc


class TranscriptStore:
    """Thread-safe LRU of stage transcripts keyed by opaque ids."""

    def __init__(self, capacity: int = 256):
        self.capacity = capacity
        self._entries: OrderedDict[str, tuple] = OrderedDict()
        self._lock = threading.Lock()

    def put(self, transcripts: tuple) -> str:
        tid = uuid.uuid4().hex
        with self._lock:
            self._entries[tid] = transcripts
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)
        return tid

    def get(self, tid: str) -> tuple | None:
        with self._lock:
            entry = self._entries.get(tid)
            if entry is not None:
                self._entries.move_to_end(tid)
            return entry

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


def _error(status: int, message: str, diagnostics: list[str] | None = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": message, "diagnostics": diagnostics or []},
    )


def _loops_json(diagram: CausalLoopDiagram) -> list[dict]:
    display = {v.normalized: v.raw for v in diagram.variables}
    return [
        {
            "length": loop.length,
            "kind": loop.kind.value,
            "members": [display[name] for name in loop.member_names],
        }
        for loop in enumerate_loops(diagram)
    ]


def _item_detail(item: CorpusItem) -> dict:
    truth = item.ground_truth
    return {
        "id": item.id,
        "dh": item.dh,
        "digraph": emit_digraph(truth),
        "render_dot": emit_render_dot(truth, annotate_loops=True),
        "source": item.source,
        "expected_loops": (
            [[length, kind.value] for length, kind in item.expected_loops]
            if item.expected_loops is not None else None
        ),
        "variables": [v.raw for v in truth.variables],
        "loops": _loops_json(truth),
    }


def _build_provider(config: ServiceConfig) -> Provider:
    if config.provider == "mock":
        if not config.fixtures_dir:
            raise BadConfig("mock provider requires fixtures_dir")
        return MockProvider(config.fixtures_dir)
    if not config.endpoint or not config.model_id:
        raise BadConfig("live provider requires endpoint and model_id")
    return HttpProvider(ProviderConfig(
        endpoint=config.endpoint,
        model_id=config.model_id,
        api_key_env=config.api_key_env,
    ))


def create_app(
    config: ServiceConfig,
    provider: Provider | None = None,
    corpus: Corpus | None = None,
) -> FastAPI:
    provider = provider or _build_provider(config)
    corpus = corpus or (
        load_corpus(config.corpus_path) if config.corpus_path else bundled_goldens())
    transcripts = TranscriptStore(capacity=config.transcript_capacity)
    app = FastAPI(title="cldforge", docs_url=None, redoc_url=None)
    app.state.transcripts = transcripts
    # browser clients load the UI from another origin (e.g. a dev server)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["Content-Type"],
    )

    @app.middleware("http")
    async def body_size_limit(request: Request, call_next):
        length = request.headers.get("content-length")
        if length is not None:
            try:
                if int(length) > config.max_body_bytes:
                    return _error(413, "request body too large")
            except ValueError:
                return _error(400, "invalid Content-Length header")
        return await call_next(request)

    async def read_json(request: Request) -> dict | JSONResponse:
        try:
            payload = json.loads(await request.body())
        except ValueError:
            return _error(400, "request body is not valid JSON")
        if not isinstance(payload, dict):
            return _error(400, "request body must be a JSON object")
        return payload

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "provider": config.provider}

    @app.post("/api/generate")
    async def generate(request: Request):
        payload = await read_json(request)
        if isinstance(payload, JSONResponse):
            return payload
        dh = payload.get("dh")
        if not isinstance(dh, str) or not dh.strip():
            return _error(400, "field 'dh' must be a non-empty string")
        slug = payload.get("strategy")
        try:
            strategy = Strategy(slug)
        except ValueError:
            valid = ", ".join(s.value for s in Strategy)
            return _error(400, f"unknown strategy {slug!r}; expected one of: {valid}")
        shots = payload.get("shots", config.shots)
        if not isinstance(shots, int) or isinstance(shots, bool) or shots < 0:
            return _error(400, "field 'shots' must be a non-negative integer")
        try:
            record = run_pipeline(provider, strategy, dh, corpus, shots)
        except (PreconditionViolation, NotEnoughExemplars) as exc:
            return _error(400, str(exc))
        except ClientError as exc:
            return _error(502, f"provider failure: {exc}")
        tid = transcripts.put(record.stage_transcripts)
        diagram = record.diagram
        return {
            "digraph": emit_digraph(diagram) if diagram else None,
            "render_dot": emit_render_dot(diagram, annotate_loops=True) if diagram else None,
            "variables": [v.raw for v in diagram.variables] if diagram else [],
            "loops": _loops_json(diagram) if diagram else [],
            "diagnostics": [str(d) for d in record.diagnostics],
            "transcripts_id": tid,
        }

    @app.post("/api/evaluate")
    async def evaluate_endpoint(request: Request):
        payload = await read_json(request)
        if isinstance(payload, JSONResponse):
            return payload
        generated_text = payload.get("generated_digraph")
        if not isinstance(generated_text, str):
            return _error(400, "field 'generated_digraph' must be a string")
        truth_text = payload.get("truth_digraph")
        truth_id = payload.get("truth_id")
        if (truth_text is None) == (truth_id is None):
            return _error(400, "provide exactly one of 'truth_digraph' or 'truth_id'")
        threshold = payload.get("threshold", config.threshold)
        if not isinstance(threshold, (int, float)) or isinstance(threshold, bool) \
                or not 0 < threshold <= 1:
            return _error(400, "field 'threshold' must be a number in (0, 1]")
        if truth_id is not None:
            if not isinstance(truth_id, str):
                return _error(400, "field 'truth_id' must be a string")
            try:
                truth_diagram = corpus.get(truth_id).ground_truth
            except KeyError:
                return _error(400, f"unknown corpus item {truth_id!r}")
        else:
            if not isinstance(truth_text, str):
                return _error(400, "field 'truth_digraph' must be a string")
            try:
                truth_diagram, _ = parse_digraph(truth_text, ParseMode.STRICT)
            except DigraphSyntaxError as exc:
                return _error(400, "invalid truth_digraph", [str(exc)])
        try:
            generated, _ = parse_digraph(generated_text, ParseMode.STRICT)
        except DigraphSyntaxError as exc:
            return _error(400, "invalid generated_digraph", [str(exc)])
        return evaluate(generated, truth_diagram, float(threshold)).to_dict()

    @app.get("/api/corpus")
    def corpus_index() -> dict:
        items = []
        for item in corpus:
            loops = enumerate_loops(item.ground_truth)
            items.append({
                "id": item.id,
                "source": item.source,
                "variable_count": len(item.ground_truth.variables),
                "loop_summary": [[lp.length, lp.kind.value] for lp in loops],
            })
        return {"items": items}

    @app.get("/api/corpus/{item_id}")
    def corpus_item(item_id: str):
        try:
            item = corpus.get(item_id)
        except KeyError:
            return _error(404, f"unknown corpus item {item_id!r}")
        return _item_detail(item)

    @app.get("/api/transcripts/{transcripts_id}")
    def transcript(transcripts_id: str):
        entry = transcripts.get(transcripts_id)
        if entry is None:
            return _error(404, "unknown or expired transcripts id")
        return {"transcripts": [[prompt, completion] for prompt, completion in entry]}

    return app


def _check_bindable(host: str, port: int) -> None:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise AddressInUse(f"cannot bind {host}:{port}: {exc}") from exc
    finally:
        probe.close()


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted. Raises AddressInUse/BadConfig."""
    import uvicorn

    host, _, port_text = config.listen.rpartition(":")
    if not host or not port_text.isdigit():
        raise BadConfig(f"listen address {config.listen!r} must be host:port")
    port = int(port_text)
    app = create_app(config)
    _check_bindable(host, port)
    uvicorn.run(app, host=host, port=port, log_level="warning")
