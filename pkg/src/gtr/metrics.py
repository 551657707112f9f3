"""Answer-quality metrics: ROUGE-N, ROUGE-L, semantic answer similarity,
and batch aggregation over labeled evaluation items.

All ROUGE variants run over lowercased tokens from the shared tokenizer,
without stemming or stopword removal. Semantic answer similarity (SAS) is
the cosine of the two texts' embeddings through the configured embedder, so
it runs offline with the hashed bag-of-words backend and approximates a
learned scorer when an HTTP embedder is configured.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .chunking import token_count, token_texts
from .embedding import EmbedderConfig, embed
from .errors import InvalidInput
from .store import cosine

SUMMARY_COLUMNS = (
    "truthful_pct",
    "rouge1_p",
    "rouge2_p",
    "rougeL_p",
    "sas",
    "resp_ms",
    "tokens",
)


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def _tokens(text: str) -> list[str]:
    return [t.lower() for t in token_texts(text)]


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: str, reference: str, n: int) -> RougeScore:
    """Clipped n-gram overlap; either side empty scores zero."""
    if n < 1:
        raise InvalidInput(f"n must be positive, got {n}")
    cand = _ngrams(_tokens(candidate), n)
    ref = _ngrams(_tokens(reference), n)
    cand_total = sum(cand.values())
    ref_total = sum(ref.values())
    overlap = sum((cand & ref).values())
    precision = overlap / cand_total if cand_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    return RougeScore(precision, recall, _f1(precision, recall))


def lcs_length(a: list[str], b: list[str]) -> int:
    """Longest common subsequence length by iterative dynamic programming."""
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge_l(candidate: str, reference: str) -> RougeScore:
    """LCS-based overlap: precision against the candidate length, recall
    against the reference length. rouge_l(a, b).precision equals
    rouge_l(b, a).recall exactly."""
    cand = _tokens(candidate)
    ref = _tokens(reference)
    lcs = lcs_length(cand, ref)
    precision = lcs / len(cand) if cand else 0.0
    recall = lcs / len(ref) if ref else 0.0
    return RougeScore(precision, recall, _f1(precision, recall))


def sas(candidate: str, reference: str, config: EmbedderConfig | None = None) -> float:
    """Embedding cosine between candidate and reference, in [-1, 1]."""
    config = config or EmbedderConfig()
    return cosine(embed(candidate, config), embed(reference, config))


@dataclass
class GtrEvalItem:
    question: str
    reference: str
    candidate: str
    truthful: int
    response_time_ms: float
    candidate_tokens: int | None = None

    def __post_init__(self):
        if self.truthful not in (0, 1):
            raise InvalidInput(f"truthful must be 0 or 1, got {self.truthful!r}")
        if self.candidate_tokens is None:
            self.candidate_tokens = token_count(self.candidate)


@dataclass
class TextEvalItemResult:
    question: str
    rouge1: RougeScore
    rouge2: RougeScore
    rougeL: RougeScore
    sas: float
    truthful: int
    response_time_ms: float
    candidate_tokens: int

    def to_dict(self) -> dict:
        def unpack(score: RougeScore) -> dict:
            return {"p": score.precision, "r": score.recall, "f1": score.f1}

        return {
            "question": self.question,
            "rouge1": unpack(self.rouge1),
            "rouge2": unpack(self.rouge2),
            "rougeL": unpack(self.rougeL),
            "sas": self.sas,
            "truthful": self.truthful,
            "response_time_ms": self.response_time_ms,
            "candidate_tokens": self.candidate_tokens,
        }


@dataclass
class TextEvalReport:
    items: list[TextEvalItemResult]

    def summary(self) -> dict:
        n = len(self.items)
        return {
            "truthful_pct": 100.0 * sum(i.truthful for i in self.items) / n,
            "rouge1_p": sum(i.rouge1.precision for i in self.items) / n,
            "rouge2_p": sum(i.rouge2.precision for i in self.items) / n,
            "rougeL_p": sum(i.rougeL.precision for i in self.items) / n,
            "sas": sum(i.sas for i in self.items) / n,
            "resp_ms": sum(i.response_time_ms for i in self.items) / n,
            "tokens": sum(i.candidate_tokens for i in self.items) / n,
        }

    def write_jsonl(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for item in self.items:
                f.write(json.dumps(item.to_dict(), ensure_ascii=False) + "\n")

    def format_summary(self) -> str:
        stats = self.summary()
        header = "".join(f"{c:>14}" for c in SUMMARY_COLUMNS)
        row = "".join(f"{stats[c]:>14.4f}" for c in SUMMARY_COLUMNS)
        return header + "\n" + row


def aggregate(
    items: list[GtrEvalItem], config: EmbedderConfig | None = None
) -> TextEvalReport:
    """Score every item and average into the report columns.

    Raises:
        InvalidInput: empty item list.
    """
    if not items:
        raise InvalidInput("need at least one item to aggregate")
    config = config or EmbedderConfig()
    results = [
        TextEvalItemResult(
            question=item.question,
            rouge1=rouge_n(item.candidate, item.reference, 1),
            rouge2=rouge_n(item.candidate, item.reference, 2),
            rougeL=rouge_l(item.candidate, item.reference),
            sas=sas(item.candidate, item.reference, config),
            truthful=item.truthful,
            response_time_ms=item.response_time_ms,
            candidate_tokens=item.candidate_tokens,
        )
        for item in items
    ]
    return TextEvalReport(results)


def load_items_jsonl(path: str | Path) -> list[GtrEvalItem]:
    """Read evaluation items; malformed lines are named by number.

    Each line: {"question", "reference", "candidate", "truthful",
    "response_time_ms"}.
    """
    path = Path(path)
    if not path.is_file():
        raise InvalidInput(f"items file not found: {path}")
    items = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise InvalidInput(f"{path}: malformed JSON on line {lineno}: {e}")
            try:
                items.append(
                    GtrEvalItem(
                        question=str(obj["question"]),
                        reference=str(obj["reference"]),
                        candidate=str(obj["candidate"]),
                        truthful=int(obj["truthful"]),
                        response_time_ms=float(obj["response_time_ms"]),
                    )
                )
            except (KeyError, TypeError, ValueError, InvalidInput) as e:
                raise InvalidInput(f"{path}: bad item on line {lineno}: {e}")
    return items
