"""Provider-agnostic completion client and the DH→diagram pipeline.

Two providers share one contract: a deterministic mock that replays
completions from hash-keyed fixture files, and an HTTP JSON provider that
always requests greedy decoding (temperature 0) and retries transient
failures. The pipeline treats unparseable completions as data — a record
with no diagram and diagnostics — because prose-only output is a valid
experimental outcome, not an error.
"""

from __future__ import annotations

import hashlib
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

import requests

from .corpus import Corpus
from .dotio import (
    NoDigraphFound,
    ParseDiagnostic,
    ParseMode,
    Severity,
    emit_digraph,
    extract_digraph_block,
    parse_digraph,
)
from .model import CausalLoopDiagram
from .prompting import (
    EmptyVariableList,
    ParsePlan,
    PreconditionViolation,
    Strategy,
    build_prompt,
    fill_stage2,
    parse_variable_list,
    select_exemplars,
)

__all__ = [
    "ProviderConfig",
    "GenerationRecord",
    "ClientError",
    "AuthError",
    "Timeout",
    "ProviderError",
    "RateLimited",
    "MockProvider",
    "HttpProvider",
    "RecordingProvider",
    "prompt_hash",
    "store_fixture",
    "write_golden_fixtures",
    "complete",
    "run_pipeline",
    "batch_generate",
]


class ClientError(Exception):
    """Base for transport-level completion failures."""


class AuthError(ClientError):
    pass


class Timeout(ClientError):
    pass


class ProviderError(ClientError):
    pass


class RateLimited(ClientError):
    pass


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str
    model_id: str
    api_key_env: str = "LLM_API_KEY"
    timeout: float = 30.0
    max_retries: int = 3
    max_tokens: int | None = None
    decoding: str = "greedy"

    def __post_init__(self) -> None:
        if self.decoding != "greedy":
            raise ValueError("only greedy decoding is supported")


@dataclass(frozen=True)
class GenerationRecord:
    strategy: Strategy
    dh: str
    stage_transcripts: tuple[tuple[str, str], ...]
    diagram: CausalLoopDiagram | None
    diagnostics: tuple[ParseDiagnostic, ...]
    provider_meta: dict = field(default_factory=dict)
    error: str | None = None
    item_id: str | None = None


class Provider(Protocol):
    def complete_with_meta(self, prompt: str) -> tuple[str, dict]: ...


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def store_fixture(fixture_dir: str | Path, prompt: str, completion: str) -> Path:
    """Write a completion fixture for a prompt; returns the file path."""
    path = Path(fixture_dir) / f"{prompt_hash(prompt)}.txt"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(completion, encoding="utf-8")
    return path


class MockProvider:
    """Replays completions stored as <sha256(prompt)>.txt fixture files."""

    def __init__(self, fixture_dir: str | Path):
        self.fixture_dir = Path(fixture_dir)

    def complete_with_meta(self, prompt: str) -> tuple[str, dict]:
        path = self.fixture_dir / f"{prompt_hash(prompt)}.txt"
        if not path.is_file():
            raise ProviderError(f"no fixture for prompt hash {prompt_hash(prompt)}")
        return path.read_text(encoding="utf-8"), {"model_id": "mock"}


class HttpProvider:
    """JSON-over-HTTPS completion provider locked to greedy decoding.

    Retries timeouts, 429s, and 5xx responses with exponential backoff
    starting at one second; other statuses fail immediately.
    """

    def __init__(
        self,
        config: ProviderConfig,
        session: requests.Session | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self.session = session or requests.Session()
        self._sleep = sleep

    def _api_key(self) -> str:
        key = os.environ.get(self.config.api_key_env, "")
        if not key:
            raise AuthError(
                f"api key environment variable {self.config.api_key_env!r} is not set")
        return key

    def request_body(self, prompt: str) -> dict:
        body = {"model": self.config.model_id, "prompt": prompt, "temperature": 0}
        if self.config.max_tokens is not None:
            body["max_tokens"] = self.config.max_tokens
        return body

    def complete_with_meta(self, prompt: str) -> tuple[str, dict]:
        headers = {
            "Authorization": f"Bearer {self._api_key()}",
            "Content-Type": "application/json",
        }
        body = self.request_body(prompt)
        attempts = self.config.max_retries + 1
        delay = 1.0
        failure: ClientError | None = None
        started = time.monotonic()
        for attempt in range(attempts):
            if attempt:
                self._sleep(delay)
                delay *= 2
            try:
                resp = self.session.post(
                    self.config.endpoint, headers=headers, json=body,
                    timeout=self.config.timeout)
            except requests.Timeout as exc:
                failure = Timeout(f"provider timed out: {exc}")
                continue
            except requests.RequestException as exc:
                failure = ProviderError(f"transport failure: {exc}")
                continue
            if resp.status_code == 429:
                failure = RateLimited("provider rate limit (HTTP 429)")
                continue
            if resp.status_code >= 500:
                failure = ProviderError(
                    f"provider error HTTP {resp.status_code}: {resp.text[:200]}")
                continue
            if resp.status_code in (401, 403):
                raise AuthError(f"provider rejected credentials (HTTP {resp.status_code})")
            if resp.status_code >= 400:
                raise ProviderError(
                    f"provider error HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                payload = resp.json()
                text = payload["choices"][0]["text"]
            except (ValueError, KeyError, IndexError, TypeError):
                raise ProviderError(
                    f"malformed provider response: {resp.text[:200]}")
            meta = {
                "model_id": self.config.model_id,
                "latency": time.monotonic() - started,
            }
            if isinstance(payload.get("usage"), dict):
                meta["usage"] = payload["usage"]
            return text, meta
        assert failure is not None
        raise failure


class RecordingProvider:
    """Wraps a provider, persisting every completion as a mock fixture."""

    def __init__(self, inner: Provider, fixture_dir: str | Path):
        self.inner = inner
        self.fixture_dir = Path(fixture_dir)

    def complete_with_meta(self, prompt: str) -> tuple[str, dict]:
        text, meta = self.inner.complete_with_meta(prompt)
        store_fixture(self.fixture_dir, prompt, text)
        return text, meta


def complete(provider: Provider, prompt: str) -> str:
    """Completion text for a prompt under the greedy-decoding contract."""
    text, _ = provider.complete_with_meta(prompt)
    return text


def _merge_meta(metas: list[dict]) -> dict:
    merged: dict = {}
    for meta in metas:
        for key, value in meta.items():
            if key == "latency" and "latency" in merged:
                merged["latency"] += value
            else:
                merged.setdefault(key, value)
    return merged


def _pipeline_diag(message: str) -> ParseDiagnostic:
    # Pipeline-level outcome, not located in any source text.
    return ParseDiagnostic(line=0, column=0, message=message, severity=Severity.ERROR)


def _execute(
    provider: Provider,
    strategy: Strategy,
    dh: str,
    corpus: Corpus,
    k: int,
    exclude_id: str | None,
    item_id: str | None,
    capture_transport_errors: bool,
) -> GenerationRecord:
    exemplars = [] if strategy is Strategy.BASELINE else select_exemplars(
        corpus, exclude_id, k)
    bundle = build_prompt(strategy, dh, exemplars)

    transcripts: list[tuple[str, str]] = []
    diagnostics: list[ParseDiagnostic] = []
    metas: list[dict] = []
    diagram: CausalLoopDiagram | None = None
    error: str | None = None
    variables: list[str] = []

    for stage in bundle.stages:
        body = stage.body
        if stage.parse_plan is ParsePlan.EXPECT_DIGRAPH and bundle.strategy is Strategy.TWO_STAGE:
            body = fill_stage2(body, variables)
        try:
            text, meta = provider.complete_with_meta(body)
        except ClientError as exc:
            if not capture_transport_errors:
                raise
            error = str(exc)
            break
        transcripts.append((body, text))
        metas.append(meta)
        if stage.parse_plan is ParsePlan.EXPECT_VARIABLE_LIST:
            try:
                variables = parse_variable_list(text)
            except EmptyVariableList as exc:
                diagnostics.append(_pipeline_diag(str(exc)))
                break
        else:
            try:
                block = extract_digraph_block(text)
            except NoDigraphFound as exc:
                diagnostics.append(_pipeline_diag(str(exc)))
                continue
            diagram, parse_diags = parse_digraph(block, ParseMode.LENIENT)
            diagnostics.extend(parse_diags)

    return GenerationRecord(
        strategy=strategy,
        dh=dh,
        stage_transcripts=tuple(transcripts),
        diagram=diagram,
        diagnostics=tuple(diagnostics),
        provider_meta=_merge_meta(metas),
        error=error,
        item_id=item_id,
    )


def run_pipeline(
    provider: Provider,
    strategy: Strategy,
    dh: str,
    corpus: Corpus,
    k: int,
    exclude_id: str | None = None,
) -> GenerationRecord:
    """Generate a diagram for one hypothesis; parse failures become data.

    Transport errors propagate; every completed stage's raw text is kept in
    stage_transcripts regardless of parse outcome.
    """
    if not dh.strip():
        raise PreconditionViolation("dh must be non-empty")
    return _execute(provider, strategy, dh, corpus, k, exclude_id,
                    item_id=None, capture_transport_errors=False)


def batch_generate(
    provider: Provider,
    strategy: Strategy,
    corpus: Corpus,
    k: int,
    parallelism: int = 1,
) -> list[GenerationRecord]:
    """One record per corpus item with leave-one-out exemplar selection.

    At most `parallelism` provider calls are in flight; output order always
    equals corpus order. Per-item transport errors are captured in that
    item's record rather than aborting the batch.
    """
    if parallelism < 1:
        raise PreconditionViolation("parallelism must be >= 1")

    def one(item) -> GenerationRecord:
        return _execute(provider, strategy, item.dh, corpus, k,
                        exclude_id=item.id, item_id=item.id,
                        capture_transport_errors=True)

    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = [pool.submit(one, item) for item in corpus]
        return [f.result() for f in futures]


def write_golden_fixtures(
    fixture_dir: str | Path, corpus: Corpus, k: int = 3
) -> int:
    """Seed mock fixtures answering every strategy's prompts for a corpus.

    Covers both the leave-one-out prompts used by batch generation and the
    no-exclusion prompts a direct invocation produces. The scripted
    completion for each item is its ground-truth digraph (with a faithful
    variable list for the two-stage first turn); returns the fixture count.
    """
    written = 0
    for item in corpus:
        truth_digraph = emit_digraph(item.ground_truth)
        for strategy in Strategy:
            excludes = [item.id, None] if strategy is not Strategy.BASELINE else [None]
            for exclude in excludes:
                exemplars = [] if strategy is Strategy.BASELINE else select_exemplars(
                    corpus, exclude, k)
                bundle = build_prompt(strategy, item.dh, exemplars)
                if strategy is Strategy.TWO_STAGE:
                    names = [v.raw for v in item.ground_truth.variables]
                    listing = "\n".join(f"- {n}" for n in names)
                    store_fixture(fixture_dir, bundle.stages[0].body, listing)
                    filled = fill_stage2(bundle.stages[1].body,
                                         parse_variable_list(listing))
                    store_fixture(fixture_dir, filled, truth_digraph)
                    written += 2
                else:
                    store_fixture(fixture_dir, bundle.stages[0].body, truth_digraph)
                    written += 1
    return written
