import pytest

from gtr.sqleval import classify_hardness, component_counts, parse_sql

from fixtures_sql import HARDNESS_CASES


class TestCountingRules:
    @pytest.mark.parametrize(
        "sql,level,counts",
        HARDNESS_CASES,
        ids=[f"{level}-{i}" for i, (_, level, _) in enumerate(HARDNESS_CASES)],
    )
    def test_hand_applied_counts(self, sql, level, counts):
        q = parse_sql(sql)
        assert component_counts(q) == counts
        assert classify_hardness(q) == level

    def test_all_four_levels_covered(self):
        levels = {level for _, level, _ in HARDNESS_CASES}
        assert levels == {"easy", "medium", "hard", "extra"}

    def test_or_connector_counts(self):
        q = parse_sql("SELECT a FROM t WHERE b = 1 OR c = 2")
        structural, extras, nested = component_counts(q)
        assert structural == 2  # WHERE present + one OR
        assert extras == 1  # two WHERE predicates

    def test_like_counts(self):
        q = parse_sql("SELECT a FROM t WHERE b LIKE 'x%'")
        structural, _, _ = component_counts(q)
        assert structural == 2  # WHERE present + one LIKE

    def test_set_op_counts_as_nesting(self):
        q = parse_sql("SELECT a FROM t UNION SELECT a FROM u")
        assert component_counts(q)[2] == 1
        assert classify_hardness(q) == "hard"

    def test_total_function_over_clause_sets(self):
        # Classification depends only on the parsed structure, so any
        # literal perturbation maps to the same level.
        a = parse_sql("SELECT a FROM t WHERE b > 5")
        b = parse_sql("SELECT a FROM t WHERE b > 500000")
        assert classify_hardness(a) == classify_hardness(b)
