"""Endpoint drivers and the bounded-parallelism evaluation runner.

One driver speaks the chat-completion wire format (messages array, bearer
auth from an environment variable, temperature pinned to 0); deterministic
mock endpoints make the whole harness testable without model access. Mocks
read ground truth from the record side channel, never from the prompt.
"""

from __future__ import annotations

import json
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import requests

from reviewgap import charsets, prompts
from reviewgap.pairing import ReviewPair, round_score, sentiment_class
from reviewgap.prompts import PromptInstance, render, shuffle_seed
from reviewgap.records import ReviewRecord
from reviewgap.manifests import manifest_hash


@dataclass
class CompletionResult:
    review_ref: str
    variant: str
    raw_text: str | None
    latency: float
    attempt_count: int
    transport_error: str | None = None


@dataclass
class ModelEndpoint:
    """Configuration of one chat-completion HTTP endpoint."""

    name: str
    base_url: str
    auth_token_env_var: str = ""
    supports_system_role: bool = True
    request_timeout: float = 30.0
    max_retries: int = 3


class HttpChatEndpoint:
    def __init__(self, config: ModelEndpoint):
        self.config = config
        self.name = config.name
        self.supports_system_role = config.supports_system_role

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        env = self.config.auth_token_env_var
        if env and os.environ.get(env):
            headers["Authorization"] = f"Bearer {os.environ[env]}"
        return headers

    def complete(self, prompt: PromptInstance, record: ReviewRecord | None = None) -> CompletionResult:
        messages = []
        if prompt.system_text and self.supports_system_role:
            messages.append({"role": "system", "content": prompt.system_text})
        messages.append({"role": "user", "content": prompt.user_text})
        payload = {"model": self.name, "messages": messages, "temperature": 0}

        start = time.monotonic()
        last_error = "no attempt made"
        attempts = 0
        for attempt in range(self.config.max_retries + 1):
            attempts = attempt + 1
            if attempt:
                time.sleep(min(0.5 * 2 ** (attempt - 1), 8.0))
            try:
                resp = requests.post(
                    self.config.base_url,
                    json=payload,
                    headers=self._headers(),
                    timeout=self.config.request_timeout,
                )
            except requests.RequestException as exc:
                last_error = f"transport: {exc}"
                continue
            if resp.status_code // 100 == 5:
                last_error = f"http {resp.status_code}: {resp.text[:500]}"
                continue
            if resp.status_code // 100 != 2:
                return CompletionResult(
                    prompt.review_ref, prompt.variant, None,
                    time.monotonic() - start, attempts,
                    transport_error=f"http {resp.status_code}: {resp.text[:500]}",
                )
            try:
                text = resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                return CompletionResult(
                    prompt.review_ref, prompt.variant, None,
                    time.monotonic() - start, attempts,
                    transport_error=f"bad response body: {exc}",
                )
            return CompletionResult(
                prompt.review_ref, prompt.variant, str(text),
                time.monotonic() - start, attempts,
            )
        return CompletionResult(
            prompt.review_ref, prompt.variant, None,
            time.monotonic() - start, attempts, transport_error=last_error,
        )


class _MockEndpoint:
    """Deterministic endpoints report zero latency so result files are stable."""

    supports_system_role = True
    name = "mock"

    def _answer(self, prompt: PromptInstance, record: ReviewRecord | None) -> str:
        raise NotImplementedError

    def complete(self, prompt: PromptInstance, record: ReviewRecord | None = None) -> CompletionResult:
        return CompletionResult(prompt.review_ref, prompt.variant, self._answer(prompt, record), 0.0, 1)


class EchoScoreEndpoint(_MockEndpoint):
    """Answers the record's own rounded score: a perfect predictor."""

    name = "mock:echo-score"

    def _answer(self, prompt, record):
        return str(round_score(record.score))


class ConstantEndpoint(_MockEndpoint):
    def __init__(self, value: str):
        self.value = str(value)
        self.name = f"mock:constant-{self.value}"

    def _answer(self, prompt, record):
        return self.value


class BiasedEndpoint(_MockEndpoint):
    """Echo endpoint that offsets predictions for one variety (harness probe)."""

    def __init__(self, variety: str = "tw", delta: int = 1):
        self.variety = variety
        self.delta = delta
        self.name = f"mock:biased-{variety}{delta:+d}"

    def _answer(self, prompt, record):
        score = round_score(record.score)
        if record.variety == self.variety:
            score += self.delta
        return str(score)


class EchoSentimentEndpoint(_MockEndpoint):
    """Answers the true 3-class sentiment label (for the length sweep)."""

    name = "mock:echo-sentiment"

    def _answer(self, prompt, record):
        return sentiment_class(record.score)


def parse_endpoint_spec(spec: str) -> object:
    """Build an endpoint from a CLI spec: mock:* or name=url[,env=VAR][,nosystem]."""
    if spec.startswith("mock:"):
        kind = spec[len("mock:"):]
        if kind == "echo-score":
            return EchoScoreEndpoint()
        if kind == "echo-sentiment":
            return EchoSentimentEndpoint()
        if kind.startswith("constant-"):
            return ConstantEndpoint(kind[len("constant-"):])
        m = re.fullmatch(r"biased(?:-([a-z]+)([+-]\d+))?", kind)
        if m:
            variety = m.group(1) or "tw"
            delta = int(m.group(2)) if m.group(2) else 1
            return BiasedEndpoint(variety, delta)
        raise ValueError(f"unknown mock endpoint: {spec!r}")
    if "=" in spec:
        name, rest = spec.split("=", 1)
        parts = rest.split(",")
        url = parts[0]
        env = ""
        system = True
        for opt in parts[1:]:
            if opt.startswith("env="):
                env = opt[4:]
            elif opt == "nosystem":
                system = False
        return HttpChatEndpoint(
            ModelEndpoint(name=name, base_url=url, auth_token_env_var=env, supports_system_role=system)
        )
    raise ValueError(f"endpoint spec must be mock:* or name=url[,env=VAR][,nosystem]: {spec!r}")


@dataclass
class EvalResult:
    """One completion keyed by (pair_id, side)."""

    pair_id: str
    side: str  # "tw" | "cn"
    record_id: str
    variant: str
    raw_text: str | None
    latency: float
    attempts: int
    transport_error: str | None = None

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "side": self.side,
            "record_id": self.record_id,
            "variant": self.variant,
            "raw_text": self.raw_text,
            "latency": self.latency,
            "attempts": self.attempts,
            "transport_error": self.transport_error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalResult":
        return cls(
            d["pair_id"], d["side"], d["record_id"], d["variant"],
            d.get("raw_text"), float(d.get("latency", 0.0)),
            int(d.get("attempts", 1)), d.get("transport_error"),
        )


@dataclass
class RunManifest:
    endpoint: str
    variant: str
    seed: int
    template_version: str
    charset_version: str
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "endpoint": self.endpoint,
            "variant": self.variant,
            "seed": self.seed,
            "template_version": self.template_version,
            "charset_version": self.charset_version,
        }
        d.update(self.extra)
        return d

    @property
    def hash(self) -> str:
        # only identity-bearing fields participate; extras are informational
        return manifest_hash(
            {
                "endpoint": self.endpoint,
                "variant": self.variant,
                "seed": self.seed,
                "template_version": self.template_version,
                "charset_version": self.charset_version,
            }
        )


def run_eval(
    pairs: list[ReviewPair],
    endpoint,
    variant: str,
    seed: int = 0,
    parallelism: int = 1,
) -> tuple[list[EvalResult], RunManifest]:
    """Issue one completion per pair side; results sorted by (pair_id, side).

    Individual failures are recorded on the result, never raised.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")

    items = []
    for pair in pairs:
        for side, record in (("tw", pair.tw), ("cn", pair.cn)):
            prompt = render(
                record,
                variant,
                seed=shuffle_seed(seed, pair.pair_id, side),
                include_system=endpoint.supports_system_role,
            )
            items.append((pair.pair_id, side, record, prompt))

    def work(item):
        pair_id, side, record, prompt = item
        try:
            res = endpoint.complete(prompt, record)
        except Exception as exc:  # endpoint bugs become transport errors
            res = CompletionResult(prompt.review_ref, variant, None, 0.0, 1, str(exc))
        return EvalResult(
            pair_id, side, record.record_id, variant,
            res.raw_text, res.latency, res.attempt_count, res.transport_error,
        )

    if parallelism == 1:
        results = [work(it) for it in items]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(work, items))
    results.sort(key=lambda r: (r.pair_id, r.side))

    manifest = RunManifest(
        endpoint=endpoint.name,
        variant=variant,
        seed=seed,
        template_version=prompts.template_version(),
        charset_version=charsets.default_tables().version,
    )
    return results, manifest


def write_results(path: str | Path, results: list[EvalResult]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in results:
            f.write(json.dumps(r.to_dict(), ensure_ascii=False, separators=(",", ":")) + "\n")


def read_results(path: str | Path) -> list[EvalResult]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                out.append(EvalResult.from_dict(json.loads(line)))
    return out
