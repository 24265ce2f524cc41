import ast
import textwrap

import pytest

from modules.core.models import Policy, StatementKind
from modules.core.mutation_classifier import ModuleContext, MutationClassifier, Resolution

OPT = Policy.OPTIMISTIC
CONS = Policy.CONSERVATIVE


@pytest.fixture
def classify(spec_table):
    """(def_set, update_set) of the last module-level statement of a snippet"""
    def _classify(source, policy=OPT):
        tree = ast.parse(textwrap.dedent(source))
        classifier = MutationClassifier(spec_table, ModuleContext.from_tree(tree))
        def_set, update_set = classifier.classify_statement(tree.body[-1], policy)
        return set(def_set), set(update_set)
    return _classify


@pytest.fixture
def resolve(spec_table):
    """CallEffect of the call in the last (expression) statement of a snippet"""
    def _resolve(source, policy=OPT):
        tree = ast.parse(textwrap.dedent(source))
        classifier = MutationClassifier(spec_table, ModuleContext.from_tree(tree))
        return classifier.resolve_call_effect(tree.body[-1].value, policy)
    return _resolve


@pytest.mark.parametrize("source, defs, updates", [
    ("x = 1", {"x"}, set()),
    ("x += 1", set(), {"x"}),
    ("lst.append(v)", set(), {"lst"}),
    ("a[i] = v", set(), {"a"}),
    ("o.f = v", set(), {"o"}),
    ("a.b.c[0] = v", set(), {"a"}),
    ("x, (y, *z) = t", {"x", "y", "z"}, set()),
    ("a = b = c", {"a", "b"}, set()),
    ("a[0], b = 1, 2", {"b"}, {"a"}),
    ("x: int = 3", {"x"}, set()),
    ("x: int", set(), set()),
    ("import numpy as np", {"np"}, set()),
    ("from os import path, sep as s", {"path", "s"}, set()),
    ("del a[0]", set(), {"a"}),
    ("del a", set(), set()),
    ("print(n := 10)", {"n"}, set()),
    ("lst = lst.append(1)", {"lst"}, set()),
    ("x = x + [1]", {"x"}, set()),
    ("d.keys()", set(), set()),
    ("setattr(o, 'name', 1)", set(), {"o"}),
])
def test_classification_rules(classify, source, defs, updates):
    assert classify(source) == (defs, updates)


def test_compound_headers_classify_their_own_expressions(classify):
    assert classify("for i in items:\n    total.append(i)") == ({"i"}, set())
    assert classify("with ctx() as (a, b):\n    pass", CONS)[0] == {"a", "b"}
    assert classify("def f(a, b=None):\n    a.append(1)") == ({"f"}, set())
    assert classify("class Model:\n    pass") == ({"Model"}, set())


def test_except_handler_and_match_capture_define_names(spec_table):
    tree = ast.parse(textwrap.dedent("""\
        try:
            run()
        except ValueError as err:
            pass
        match point:
            case (x, *rest):
                pass
        """))
    classifier = MutationClassifier(spec_table, ModuleContext.from_tree(tree))
    handler = tree.body[0].handlers[0]
    case = tree.body[1].cases[0]

    assert classifier.classify_statement(handler, OPT) == (frozenset({"err"}), frozenset())
    assert classifier.classify_statement(case, OPT) == (frozenset({"x", "rest"}), frozenset())


def test_unknown_calls_follow_the_policy(classify, resolve):
    assert classify("mystery(a, b)", OPT) == (set(), set())
    assert classify("mystery(a, b)", CONS) == (set(), {"a", "b"})
    assert resolve("mystery(a, b)", OPT).resolution == Resolution.UNKNOWN
    assert resolve("mystery(a, key=b)", CONS).mutated == frozenset({"a", "b"})


def test_unknown_method_mutates_receiver_conservatively(classify):
    assert classify("obj.process(a)", CONS) == (set(), {"obj", "a"})
    assert classify("df.dropna().reset_index(inplace=True)", CONS) == (set(), {"df"})
    assert classify("df.dropna().reset_index(inplace=True)", OPT) == (set(), set())


def test_heuristic_method_names(resolve):
    effect = resolve("d.keys()", CONS)
    assert effect.resolution == Resolution.HEURISTIC
    assert effect.mutated == frozenset()

    effect = resolve("rows[0].sort()", OPT)
    assert effect.resolution == Resolution.HEURISTIC
    assert effect.mutated == frozenset({"rows"})


def test_local_function_body_marks_arguments(classify, resolve):
    source = """\
        def f(a):
            a.append(1)
        f(xs)
        """
    assert classify(source) == (set(), {"xs"})
    assert resolve(source).resolution == Resolution.LOCAL_BODY


def test_local_function_keyword_arguments(classify):
    source = """\
        def g(a, b):
            b[0] = 1
        g(x, b=y)
        """
    assert classify(source, CONS) == (set(), {"y"})


def test_local_function_rebinding_is_not_a_mutation(classify):
    source = """\
        def h(a):
            a += 1
            return a
        h(z)
        """
    assert classify(source, OPT) == (set(), set())
    assert classify(source, CONS) == (set(), set())


def test_local_bodies_are_analysed_one_level_deep(classify):
    source = """\
        def inner(a):
            a.append(1)
        def outer(b):
            inner(b)
        outer(xs)
        """
    # the call inside outer is not followed into inner
    assert classify(source, OPT) == (set(), set())


def test_spec_table_lookup_through_imports(classify, resolve):
    assert classify("import numpy as np\nnp.random.shuffle(arr)", CONS) == (set(), {"arr"})
    assert classify("import random\nrandom.shuffle(xs)") == (set(), {"xs"})
    assert classify("from random import shuffle\nshuffle(xs)") == (set(), {"xs"})
    assert classify("import json\njson.dump(data, fh)") == (set(), {"fh"})

    effect = resolve("import numpy as np\nnp.append(arr, 1)", CONS)
    assert effect.resolution == Resolution.SPEC_TABLE
    assert effect.mutated == frozenset()


def test_builtins_are_resolved_without_imports(resolve):
    effect = resolve("len(xs)", CONS)
    assert effect.resolution == Resolution.SPEC_TABLE
    assert effect.mutated == frozenset()


def test_import_aliases_are_never_mutated(classify):
    assert classify("import pandas as pd\npd.options.display.max_rows = 10") == (set(), set())
    assert classify("import matplotlib.pyplot as plt\nplt.unknown_call(fig)", CONS) == (set(), {"fig"})


def test_aliasing_is_ignored(classify):
    assert classify("b = a\nb.append(1)") == (set(), {"b"})


def test_optimistic_updates_are_subset_of_conservative(classify):
    snippets = [
        "mystery(a, b)", "obj.method(x).other(y)", "lst.append(v)", "d.get(k)", "x += f(y)",
        "a[g(b)] = h(c)", "print(len(z))", "import os\nos.remove(p)", "for i in gen(xs):\n    pass",
    ]
    for snippet in snippets:
        _, opt = classify(snippet, OPT)
        _, cons = classify(snippet, CONS)
        assert opt <= cons, snippet


@pytest.mark.parametrize("source, kind", [
    ("x = 1", StatementKind.ASSIGN),
    ("x += 1", StatementKind.AUG_ASSIGN),
    ("a[0] = 1", StatementKind.SUBSCRIPT_ASSIGN),
    ("o.f = 1", StatementKind.ATTRIBUTE_ASSIGN),
    ("f(x)", StatementKind.CALL_STMT),
    ("import os", StatementKind.IMPORT),
    ("if x:\n    pass", StatementKind.CONTROL),
    ("pass", StatementKind.OTHER),
])
def test_statement_kinds(source, kind):
    assert MutationClassifier.statement_kind(ast.parse(source).body[-1]) == kind


def test_statement_reads_leave_out_bound_names():
    reads = MutationClassifier.statement_reads(ast.parse("y = [v * k for v in xs] + list(map(lambda q: q, ys))").body[0])
    assert reads == frozenset({"k", "xs", "list", "map", "ys"})

    assert MutationClassifier.statement_reads(ast.parse("x += y").body[0]) == frozenset({"x", "y"})


def test_classification_is_deterministic(classify):
    source = "obj.method(a, b[0], *c, key=d.e)"
    assert classify(source, CONS) == classify(source, CONS)


def statement_at(scope, line):
    return next(s for s in scope.statements if s.line == line)


def test_function_imports_do_not_hide_parameters_elsewhere(scope_of):
    source = """\
    def loader():
        import data
        return data.load()

    def work(data):
        data.append(1)
    """
    assert statement_at(scope_of(source, "work"), 6).update_set(OPT) == {"data"}
    assert statement_at(scope_of(source, "loader"), 3).update_set(CONS) == frozenset()


def test_module_imports_are_visible_in_functions(scope_of):
    source = """\
    import pandas as pd

    def f():
        pd.options.display.max_rows = 10
    """
    assert statement_at(scope_of(source, "f"), 4).update_set(CONS) == frozenset()


def test_enclosing_function_imports_reach_nested_functions(scope_of):
    source = """\
    def outer():
        import numpy as np
        def inner():
            np.extra = 1
        return inner

    def other():
        np.extra = 1
    """
    assert statement_at(scope_of(source, "outer.inner"), 4).update_set(CONS) == frozenset()
    assert statement_at(scope_of(source, "other"), 8).update_set(OPT) == {"np"}
