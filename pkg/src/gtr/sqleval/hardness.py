"""Spider-style difficulty classification by counted query components.

A query is scored on three counts, then thresholded into one of four
levels. The rules below restate the benchmark's component counting so this
module is self-contained:

Structural count (``structural``):
    +1 each for a nonempty WHERE, GROUP BY, ORDER BY, and a LIMIT;
    +1 per join beyond the first table (``len(from_tables) - 1``);
    +1 per OR connector in WHERE / HAVING / join conditions;
    +1 per LIKE predicate in WHERE / HAVING / join conditions.

Extras count (``extras``):
    +1 if the query applies more than one aggregate (counted across select
    terms, predicate operands, GROUP BY, and ORDER BY);
    +1 if it selects more than one term;
    +1 if it has more than one WHERE predicate;
    +1 if it groups by more than one term.

Nesting count (``nested``):
    one per subquery used as a comparison value in WHERE / HAVING / join
    conditions, plus one if the query is chained with INTERSECT / UNION /
    EXCEPT.

Levels:
    easy    structural <= 1 and extras == 0 and nested == 0
    medium  no nesting, and (extras <= 2 and structural <= 1
            or structural <= 2 and extras < 2)
    hard    (extras > 2 and structural <= 2 and nested == 0)
            or (2 < structural <= 3 and extras <= 2 and nested == 0)
            or (structural <= 1 and extras == 0 and nested <= 1)
    extra   everything else

Counts are taken over the normalized clause sets, so duplicate predicates
that collapse under value anonymization count once.
"""

from __future__ import annotations

from .parser import ClauseSets, ColumnTerm, Predicate, ValExpr


def _expr_agg_count(expr: ValExpr | None) -> int:
    if expr is None:
        return 0
    count = 1 if expr.left.agg else 0
    if expr.right is not None and expr.right.agg:
        count += 1
    return count


def _value_agg_count(value) -> int:
    return _expr_agg_count(value) if isinstance(value, ValExpr) else 0


def _pred_agg_count(pred: Predicate) -> int:
    return (
        _expr_agg_count(pred.lhs)
        + _value_agg_count(pred.rhs)
        + _value_agg_count(pred.rhs2)
    )


def _aggregate_count(q: ClauseSets) -> int:
    count = 0
    for term in q.select:
        count += (1 if term.agg else 0) + _expr_agg_count(term.expr)
    for bucket in (q.join_conditions, q.where, q.having):
        count += sum(_pred_agg_count(p) for p in bucket)
    count += sum(1 for t in q.group_by if isinstance(t, ColumnTerm) and t.agg)
    count += sum(_expr_agg_count(expr) for expr, _ in q.order_by)
    return count


def component_counts(q: ClauseSets) -> tuple[int, int, int]:
    """(structural, extras, nested) counts for one query."""
    structural = 0
    structural += 1 if q.where else 0
    structural += 1 if q.group_by else 0
    structural += 1 if q.order_by else 0
    structural += 1 if q.limit else 0
    structural += max(len(q.from_tables) - 1, 0)
    structural += q.or_count
    for bucket in (q.join_conditions, q.where, q.having):
        structural += sum(1 for p in bucket if p.op == "like")

    extras = 0
    if _aggregate_count(q) > 1:
        extras += 1
    if len(q.select) > 1:
        extras += 1
    if len(q.where) > 1:
        extras += 1
    if len(q.group_by) > 1:
        extras += 1

    nested = len(q.subqueries) + (1 if q.set_op is not None else 0)
    return structural, extras, nested


def classify_hardness(q: ClauseSets) -> str:
    """One of "easy", "medium", "hard", "extra"."""
    structural, extras, nested = component_counts(q)
    if structural <= 1 and extras == 0 and nested == 0:
        return "easy"
    if nested == 0 and (
        (extras <= 2 and structural <= 1) or (structural <= 2 and extras < 2)
    ):
        return "medium"
    if (
        (extras > 2 and structural <= 2 and nested == 0)
        or (2 < structural <= 3 and extras <= 2 and nested == 0)
        or (structural <= 1 and extras == 0 and nested <= 1)
    ):
        return "hard"
    return "extra"
