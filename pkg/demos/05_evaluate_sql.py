#!/usr/bin/env python3
"""SQL evaluation: structural exact-set-match, execution accuracy against a
live database, difficulty classification, and the per-level report."""

import sqlite3
import tempfile
from pathlib import Path

from gtr.sqleval import (
    classify_hardness,
    evaluate_suite,
    exact_set_match,
    execution_accuracy,
    parse_sql,
)

# Exact-set-match compares clause sets with literals anonymized, so the
# same shape with different constants matches, while a structural change
# does not.
print(exact_set_match("SELECT name FROM singer WHERE age > 20",
                      "SELECT name FROM singer WHERE age > 30").match)   # True
print(exact_set_match("SELECT name FROM singer",
                      "SELECT DISTINCT name FROM singer").match)          # False

# Difficulty comes from counted components (joins, predicates, nesting...).
for sql in (
    "SELECT name FROM city",
    "SELECT country, count(*) FROM city GROUP BY country",
    "SELECT name FROM city WHERE pop > (SELECT avg(pop) FROM city)",
):
    print(classify_hardness(parse_sql(sql)), "<-", sql)

# Execution accuracy runs both queries read-only and compares row multisets
# (ordered when the gold query has a top-level ORDER BY).
workdir = Path(tempfile.mkdtemp(prefix="gtr-demo-"))
db_dir = workdir / "databases" / "world"
db_dir.mkdir(parents=True)
db_path = db_dir / "world.sqlite"
conn = sqlite3.connect(db_path)
conn.executescript("""
CREATE TABLE city (name TEXT, country TEXT, pop INTEGER);
INSERT INTO city VALUES ('Oslo', 'Norway', 700000), ('Bergen', 'Norway', 290000),
                        ('Lyon', 'France', 520000);
""")
conn.commit()
conn.close()

print(execution_accuracy("SELECT name FROM city ORDER BY name",
                         "SELECT name FROM city", db_path))              # True

# The suite scores every pair and breaks accuracy down by difficulty.
pairs = [
    {"question": "", "db_id": "world",
     "gold": "SELECT name FROM city WHERE country = 'Norway'",
     "pred": "SELECT name FROM city WHERE country = 'Norway'"},
    {"question": "", "db_id": "world",
     "gold": "SELECT country, count(*) FROM city GROUP BY country",
     "pred": "SELECT country, count(*) FROM city GROUP BY name"},
]
report = evaluate_suite(pairs, workdir / "databases")
print()
print(report.format_summary())
