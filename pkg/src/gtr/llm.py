"""Uniform completion interface over mock and remote LLM backends.

Mock backends (``echo_context``, ``template_sql``, ``fixed``) are pure
functions of the prompt and config and report zero latency, so runs with
identical inputs produce byte-identical traces. The ``http`` backend speaks
the OpenAI-compatible completions protocol::

    POST endpoint_url {"prompt": ..., "max_tokens": ..., "temperature": ...}
    -> {"choices": [{"text": ...}]}

and measures real wall-clock latency. ``GTR_LLM_URL`` supplies the endpoint
when the config leaves it unset; an explicitly configured URL wins so that
command-line flags keep precedence over the environment.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import requests

from .chunking import token_count
from .errors import BackendUnavailable, InvalidConfig, InvalidInput, MalformedPrompt

ENV_LLM_URL = "GTR_LLM_URL"

CONTEXT_PREFIX = "Context:\n"
QUESTION_DELIMITER = "\n\nQuestion: "
QUESTION_LINE_PREFIX = "Question: "

_BACKENDS = ("echo_context", "template_sql", "fixed", "http")


@dataclass
class LlmConfig:
    backend: str = "echo_context"
    endpoint_url: str | None = None
    max_new_tokens: int = 256
    temperature: float = 0.0
    fixed_text: str | None = None
    sql_templates: dict[str, str] = field(default_factory=dict)
    timeout_s: float = 30.0

    def __post_init__(self):
        if self.backend not in _BACKENDS:
            raise InvalidConfig(f"unknown llm backend: {self.backend!r}")
        if self.max_new_tokens < 1:
            raise InvalidConfig("max_new_tokens must be positive")
        if self.temperature < 0:
            raise InvalidConfig("temperature must be nonnegative")
        if self.backend == "fixed" and self.fixed_text is None:
            raise InvalidConfig("fixed backend requires fixed_text")
        if self.backend != "fixed" and self.fixed_text is not None:
            raise InvalidConfig("fixed_text is only valid with the fixed backend")
        if self.backend != "http" and self.endpoint_url is not None:
            raise InvalidConfig("endpoint_url is only valid with the http backend")


@dataclass
class Completion:
    text: str
    prompt_tokens: int
    completion_tokens: int
    latency_ms: float


def extract_context(prompt: str) -> str:
    """Return the context section of a retrieval prompt, verbatim."""
    if not prompt.startswith(CONTEXT_PREFIX):
        raise MalformedPrompt("prompt does not start with the context delimiter")
    # The template appends the question after the context, so the last
    # occurrence of the delimiter is the template's own.
    cut = prompt.rfind(QUESTION_DELIMITER)
    if cut < len(CONTEXT_PREFIX):
        raise MalformedPrompt("prompt has no question delimiter after the context")
    return prompt[len(CONTEXT_PREFIX) : cut]


def extract_question(prompt: str) -> str:
    """Return the text of the prompt's 'Question: ' line.

    Templates place the question after the context blocks, so the last
    matching line is the template's own even if quoted data contains one.
    """
    for line in reversed(prompt.splitlines()):
        if line.startswith(QUESTION_LINE_PREFIX):
            return line[len(QUESTION_LINE_PREFIX) :]
    raise MalformedPrompt("prompt has no 'Question: ' line")


def _complete_http(prompt: str, config: LlmConfig) -> str:
    url = config.endpoint_url or os.environ.get(ENV_LLM_URL)
    if not url:
        raise InvalidConfig(
            f"http backend needs endpoint_url or the {ENV_LLM_URL} environment variable"
        )
    payload = {
        "prompt": prompt,
        "max_tokens": config.max_new_tokens,
        "temperature": config.temperature,
    }
    try:
        resp = requests.post(url, json=payload, timeout=config.timeout_s)
    except requests.RequestException as e:
        raise BackendUnavailable(f"llm backend unreachable: {e}")
    if resp.status_code != 200:
        raise BackendUnavailable(f"llm backend returned HTTP {resp.status_code}")
    try:
        return str(resp.json()["choices"][0]["text"])
    except (ValueError, KeyError, IndexError, TypeError) as e:
        raise BackendUnavailable(f"llm backend returned a malformed body: {e}")


def complete(prompt: str, config: LlmConfig | None = None) -> Completion:
    """Run one completion; token counts use the shared tokenizer.

    Raises:
        InvalidInput: empty prompt.
        MalformedPrompt: a mock backend cannot find its prompt structure.
        BackendUnavailable: http failures.
    """
    config = config or LlmConfig()
    if not prompt:
        raise InvalidInput("prompt must be nonempty")

    if config.backend == "echo_context":
        text, latency_ms = extract_context(prompt), 0.0
    elif config.backend == "template_sql":
        question = extract_question(prompt)
        text, latency_ms = config.sql_templates.get(question, "SELECT NULL;"), 0.0
    elif config.backend == "fixed":
        text, latency_ms = config.fixed_text, 0.0
    else:
        started = time.perf_counter()
        text = _complete_http(prompt, config)
        latency_ms = (time.perf_counter() - started) * 1000.0

    return Completion(
        text=text,
        prompt_tokens=token_count(prompt),
        completion_tokens=token_count(text),
        latency_ms=latency_ms,
    )
