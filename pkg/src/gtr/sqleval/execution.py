"""Execution accuracy: compare what two queries actually return.

Both statements run through the read-only executor. Rows compare as
multisets unless the gold query orders its output, in which case sequences
compare positionally. Numbers compare with 1e-6 relative tolerance, text
case-sensitively, and NULL equals NULL.
"""

from __future__ import annotations

import math
from pathlib import Path

from ..errors import EvalError, GtrError
from ..tables import ResultSet, execute_sql

_REL_TOL = 1e-6

_SET_OPS = ("union", "intersect", "except")


def has_top_level_order_by(sql: str) -> bool:
    """True when ORDER BY appears outside any parentheses or string."""
    depth = 0
    i, n = 0, len(sql)
    lowered = sql.lower()
    while i < n:
        c = sql[i]
        if c in ("'", '"'):
            i += 1
            while i < n:
                if sql[i] == c:
                    if i + 1 < n and sql[i + 1] == c:
                        i += 2
                        continue
                    break
                i += 1
            i += 1
        elif c == "(":
            depth += 1
            i += 1
        elif c == ")":
            depth = max(depth - 1, 0)
            i += 1
        elif depth == 0 and lowered.startswith("order", i):
            before_ok = i == 0 or not (sql[i - 1].isalnum() or sql[i - 1] == "_")
            rest = lowered[i + 5 :].lstrip()
            after_by = rest[2:3]
            if (
                before_ok
                and rest.startswith("by")
                and not (after_by.isalnum() or after_by == "_")
            ):
                return True
            i += 5
        else:
            i += 1
    return False


def _values_equal(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    a_num = isinstance(a, (int, float)) and not isinstance(a, bool)
    b_num = isinstance(b, (int, float)) and not isinstance(b, bool)
    if a_num and b_num:
        return math.isclose(a, b, rel_tol=_REL_TOL, abs_tol=0.0)
    if type(a) is not type(b):
        return False
    return a == b


def _rows_equal(a: tuple, b: tuple) -> bool:
    return len(a) == len(b) and all(_values_equal(x, y) for x, y in zip(a, b))


def _sort_key(row: tuple) -> tuple:
    key = []
    for value in row:
        if value is None:
            key.append((0, ""))
        elif isinstance(value, bool):
            key.append((1, float(value)))
        elif isinstance(value, (int, float)):
            key.append((1, float(value)))
        elif isinstance(value, str):
            key.append((2, value))
        elif isinstance(value, bytes):
            key.append((3, value.hex()))
        else:
            key.append((4, repr(value)))
    return tuple(key)


def results_match(gold: ResultSet, pred: ResultSet, ordered: bool) -> bool:
    """Row-for-row comparison; multiset semantics unless ordered."""
    if len(gold.rows) != len(pred.rows):
        return False
    gold_rows = gold.rows if ordered else sorted(gold.rows, key=_sort_key)
    pred_rows = pred.rows if ordered else sorted(pred.rows, key=_sort_key)
    return all(_rows_equal(g, p) for g, p in zip(gold_rows, pred_rows))


def execution_accuracy(
    pred: str,
    gold: str,
    db_path: str | Path,
    *,
    timeout_ms: int = 30_000,
) -> bool:
    """True iff pred's output matches gold's on this database.

    A pred-side execution error scores False; a gold-side failure raises
    EvalError, since the defect is in the dataset rather than the model.
    """
    try:
        gold_result = execute_sql(gold, db_path, timeout_ms=timeout_ms, row_limit=None)
    except GtrError as e:
        raise EvalError(f"gold query failed: {e}") from e
    try:
        pred_result = execute_sql(pred, db_path, timeout_ms=timeout_ms, row_limit=None)
    except GtrError:
        return False
    return results_match(gold_result, pred_result, has_top_level_order_by(gold))
