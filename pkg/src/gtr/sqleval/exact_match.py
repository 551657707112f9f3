"""Exact-set-match: structural SQL equivalence, blind to literal values."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ParseError
from .parser import ClauseSets, parse_sql

CLAUSE_NAMES = (
    "select",
    "from",
    "where",
    "group_by",
    "having",
    "order_by",
    "limit",
    "set_op",
)


@dataclass
class MatchResult:
    match: bool
    clauses: dict[str, bool] = field(default_factory=dict)
    error: str | None = None

    def __bool__(self) -> bool:
        return self.match


def compare_clauses(pred: ClauseSets, gold: ClauseSets) -> dict[str, bool]:
    """Per-clause equality; ORDER BY is order- and direction-sensitive."""
    return {
        "select": pred.select == gold.select
        and pred.select_distinct == gold.select_distinct,
        "from": pred.from_tables == gold.from_tables
        and pred.join_conditions == gold.join_conditions,
        "where": pred.where == gold.where,
        "group_by": pred.group_by == gold.group_by,
        "having": pred.having == gold.having,
        "order_by": pred.order_by == gold.order_by,
        "limit": pred.limit == gold.limit,
        "set_op": pred.set_op == gold.set_op,
    }


def exact_set_match(pred: str, gold: str) -> MatchResult:
    """True iff every clause set of pred equals the corresponding gold set.

    A parse failure on either side scores False with the reason recorded
    instead of raising.
    """
    try:
        pred_cs = parse_sql(pred)
    except ParseError as e:
        return MatchResult(False, error=f"pred parse error: {e}")
    try:
        gold_cs = parse_sql(gold)
    except ParseError as e:
        return MatchResult(False, error=f"gold parse error: {e}")
    clauses = compare_clauses(pred_cs, gold_cs)
    return MatchResult(all(clauses.values()), clauses)
