import time

import pytest

from modules.core.cfg_builder import ScopeParser
from modules.core.dataflow_analyzer import DataflowAnalyzer
from modules.core.metrics_calculator import MetricsCalculator
from modules.core.models import Policy
from modules.utils.error_handler import EmptyScopeError


@pytest.fixture
def calculator(spec_table):
    return MetricsCalculator(spec_table)


@pytest.fixture
def module_record(load_script, calculator):
    def _record(text, name="<module>"):
        analysis = calculator.analyze_unit(load_script(text))
        return next(r for r in analysis.records if r.scope == name)
    return _record


def contributions(record, policy):
    return [c.contribution for c in record.value("contributions", policy)]


def test_grouped_mutations_score_zero(module_record, fig_grouped):
    started = time.perf_counter()
    record = module_record(fig_grouped)

    assert record.diffusion_opt == 0
    assert record.diffusion_cons == 0
    assert contributions(record, Policy.OPTIMISTIC) == [0, 0]
    assert time.perf_counter() - started < 1.0


def test_scattered_mutations_score_three(module_record, fig_scattered):
    started = time.perf_counter()
    record = module_record(fig_scattered)

    assert record.diffusion_opt == 3
    assert record.diffusion_cons == 3
    assert contributions(record, Policy.OPTIMISTIC) == [1, 2]
    assert [c.line for c in record.contributions_opt] == [3, 6]
    assert record.statement_count == 6
    assert record.diffusion_normalized_opt == 0.5
    assert time.perf_counter() - started < 1.0


def test_scattered_mutations_in_states(cfg_of, fig_scattered):
    cfg = cfg_of(fig_scattered)
    result = DataflowAnalyzer().run_dataflow(cfg, Policy.OPTIMISTIC)

    assert result.state_at(2)["l"] == frozenset({2})
    assert result.state_at(5)["l"] == frozenset({4, 5})


def test_worked_listing_ratio(module_record, fig_grouped):
    record = module_record(fig_grouped)

    assert record.mutating_count_opt == 2
    assert record.mutating_ratio_opt == pytest.approx(1 / 3)
    assert record.mutating_ratio_cons == pytest.approx(1 / 3)


def test_ratio_of_two_in_ten(module_record):
    record = module_record("""\
        a = []
        b = {}
        a.append(1)
        b['k'] = 2
        c = len(a)
        d = 3
        e = c + d
        f = e * 2
        g = f - 1
        print(g)
        """)

    assert record.statement_count == 10
    assert record.mutating_ratio_opt == 0.2
    assert record.mutating_ratio_cons == 0.2


def test_lifetime_spans_definition_to_last_use(module_record):
    lines = ["# padding"] * 9 + ["v = 1"] + ["# padding"] * 9 + ["print(v)"]
    record = module_record("\n".join(lines) + "\n")

    assert record.lifetimes["v"] == 11


def test_lifetime_counts_updates_and_defaults_to_one(module_record):
    record = module_record("""\
        a = 0
        b = 0
        v = []
        c = 1
        d = v
        e = 2
        f = 3
        g = 4
        v.append(1)
        """)

    assert record.lifetimes["v"] == 7
    assert record.lifetimes["g"] == 1
    assert record.max_lifetime == 7


def test_parameters_live_from_the_function_line(module_record):
    record = module_record("""\
        def f(p, unused):
            x = 1
            return p
        """, name="f")

    assert record.lifetimes == {"p": 3, "unused": 1, "x": 1}


def test_scores_without_mutations_are_zero(module_record):
    record = module_record("".join(f"x{i} = {i}\n" for i in range(25)))

    assert record.diffusion_opt == 0
    assert record.mutating_ratio_cons == 0.0


def test_back_edge_accumulates_loop_lines(module_record):
    record = module_record("""\
        v = []
        for i in r:
            v.append(i)
            y = i
        """)

    assert contributions(record, Policy.OPTIMISTIC) == [2]


def test_unknown_calls_only_count_conservatively(module_record):
    record = module_record("""\
        data = load()
        total = 0
        transform(data)
        """)

    assert record.mutating_count_opt == 0
    assert record.mutating_count_cons == 1
    assert contributions(record, Policy.CONSERVATIVE) == [1]
    assert record.diffusion_opt == 0


@pytest.mark.parametrize("k", range(6))
def test_inserted_statements_raise_contribution(module_record, k):
    text = "v = []\n" + "".join(f"w{i} = {i}\n" for i in range(k)) + "v.append(1)\n"

    record = module_record(text)

    assert contributions(record, Policy.OPTIMISTIC) == [k]


def test_renaming_variables_changes_nothing(module_record):
    template = """\
        {a} = []
        {b} = 0
        for {c} in range(4):
            if {c} % 2:
                {a}.append({c})
            {b} += {c}
        {d} = sum({a}) + {b}
        mystery({d})
        """
    first = module_record(template.format(a="items", b="total", c="i", d="result"))
    second = module_record(template.format(a="q1", b="q2", c="q3", d="q4"))

    assert sorted(first.lifetimes.values()) == sorted(second.lifetimes.values())
    for policy in Policy:
        for metric in ("mutating_count", "mutating_ratio", "diffusion", "diffusion_normalized"):
            assert first.value(metric, policy) == second.value(metric, policy)
        assert contributions(first, policy) == contributions(second, policy)


def test_empty_scopes_are_reported_by_name(write_notebook, parser, calculator):
    unit = parser.load_source_unit(write_notebook([("code", "x = 1"), ("code", "")]))

    analysis = calculator.analyze_unit(unit)

    assert analysis.empty_scopes == ["<module>", "cell_0001"]
    assert [r.scope for r in analysis.records] == ["cell_0000"]
    assert analysis.totals.statement_count == 1


def test_ratio_of_empty_scope_raises(scope_of, calculator):
    with pytest.raises(EmptyScopeError):
        calculator.mutating_statement_ratio(scope_of(""), Policy.OPTIMISTIC)


def test_ratio_over_several_scopes(load_script, spec_table, calculator):
    unit = load_script("""\
        def f(a):
            a.append(1)
            return a
        x = []
        y = f(x)
        """)
    scopes = ScopeParser(spec_table).parse_scopes(unit)

    # module: def, x = [], y = f(x) (mutates x); f: append, return
    assert calculator.mutating_statement_ratio(scopes, Policy.OPTIMISTIC) == pytest.approx(2 / 5)


@pytest.mark.parametrize("score, count, expected", [(3, 6, 0.5), (0, 7, 0.0), (5, 5, 1.0)])
def test_normalize_score(score, count, expected):
    assert MetricsCalculator.normalize_score(score, count) == expected


def test_normalize_score_rejects_empty_scopes():
    with pytest.raises(EmptyScopeError):
        MetricsCalculator.normalize_score(1, 0, "f")


def test_unit_totals_sum_scopes(load_script, calculator):
    unit = load_script("""\
        def f(a):
            b = a
            a.append(1)
            b.append(2)
        v = []
        w = 1
        v.append(w)
        """)

    analysis = calculator.analyze_unit(unit)
    totals = analysis.totals

    assert totals.statement_count == sum(r.statement_count for r in analysis.records)
    assert totals.diffusion_opt == sum(r.diffusion_opt for r in analysis.records)
    assert totals.value("mutating_ratio", Policy.OPTIMISTIC) == totals.mutating_count_opt / totals.statement_count
    assert {name for name, _ in analysis.cfgs} == {"<module>", "f"}


def test_policy_ordering_per_record(load_script, calculator):
    unit = load_script("""\
        import pandas as pd
        df = pd.read_csv("data.csv")
        df = df.dropna()
        model.fit(df)
        scores = evaluate(model, df)
        plot(scores)
        df["z"] = df["x"] * 2
        """)

    for record in calculator.analyze_unit(unit).records:
        assert record.mutating_count_opt <= record.mutating_count_cons
        assert record.mutating_ratio_opt <= record.mutating_ratio_cons


def test_dataflow_keys_stay_within_scope_variables(cfg_of):
    cfg = cfg_of("""\
        def f(a, b):
            c = a
            if b:
                a.append(c)
            return c
        """, name="f")

    result = DataflowAnalyzer().run_dataflow(cfg, Policy.CONSERVATIVE)
    variables = cfg.scope.variables()
    span = range(cfg.scope.line, cfg.scope.end_line + 1)

    for state in result.in_states.values():
        assert set(state) <= variables
        assert all(line in span for lines in state.values() for line in lines)
