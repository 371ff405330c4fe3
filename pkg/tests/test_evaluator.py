"""Ground evaluation semantics.

The integer coercion rules are the load-bearing part: every arithmetic head
treats non-integers as 0, division-like heads are total except d2, and the
term-order predicate ranks atoms before pairs.  Frozen cases below were
computed by hand from those clauses, then asserted against the code.
"""

import pytest

from conftest import rand_rng, rand_term
from termrw.evaluator import (
    EvalDomainError,
    ExecRegistry,
    UnboundVariableError,
    UnknownFunctionError,
    default_registry,
    eval_term,
    ifix,
    lexorder_le,
    nfix,
    to_boolean,
)
from termrw.terms import App, Cons, Quote, Var, mk_rp, parse_term


@pytest.fixture
def ev(reg):
    def run(text, **env):
        return eval_term(parse_term(text), env, reg)

    return run


def test_ifix_nfix():
    assert ifix(5) == 5
    assert ifix("nil") == 0
    assert ifix(Cons(1, 2)) == 0
    assert nfix(-3) == 0
    assert nfix(3) == 3


def test_to_boolean():
    assert to_boolean(True) == "t"
    assert to_boolean(False) == "nil"


# frozen from the coercion clauses: floor/mod follow Python's flooring
# division on the coerced inputs, with a zero divisor short-circuited
FLOOR_MOD_CASES = [
    ("(floor '7 '2)", 3),
    ("(floor '-7 '2)", -4),
    ("(mod '7 '2)", 1),
    ("(mod '-7 '2)", 1),
    ("(floor '7 '0)", 0),
    ("(mod '7 '0)", 7),
    ("(floor 'x '2)", 0),
    ("(mod '9 'y)", 9),
]


@pytest.mark.parametrize("text,expected", FLOOR_MOD_CASES)
def test_floor_mod_frozen(ev, text, expected):
    assert ev(text) == expected


def test_arith_coercion(ev):
    assert ev("(binary-+ '3 '4)") == 7
    assert ev("(binary-+ 'foo '4)") == 4
    assert ev("(unary-- 'foo)") == 0
    assert ev("(binary-logand '12 '10)") == 8
    assert ev("(4vec-bitand '12 '10)") == 8
    assert ev("(binary-logand '-1 '6)") == 6


def test_loghead_logapp(ev):
    assert ev("(loghead '4 '255)") == 15
    assert ev("(loghead '4 '-1)") == 15
    assert ev("(logapp '4 '15 '2)") == 47
    assert ev("(logapp '0 '9 '5)") == 5


def test_evenp_uses_coercion(ev):
    assert ev("(evenp '4)") == "t"
    assert ev("(evenp '3)") == "nil"
    assert ev("(evenp 'foo)") == "t"


def test_halving_heads(ev):
    assert ev("(f2 '7)") == 3
    assert ev("(neg-m2 '7)") == -1
    assert ev("(round-to-even '7)") == 6
    assert ev("(round-to-even '8)") == 8
    assert ev("(d2 '8)") == 4
    with pytest.raises(EvalDomainError):
        ev("(d2 '7)")
    # round-to-even composes as addition with neg-m2
    assert ev("(binary-+ '7 (neg-m2 '7))") == ev("(round-to-even '7)")


def test_structural_heads(ev):
    assert ev("(cons '1 '2)") == Cons(1, 2)
    assert ev("(car '(1 2))") == 1
    assert ev("(cdr '(1 2))") == Cons(2, "nil")
    assert ev("(car '5)") == "nil"
    assert ev("(cdr 'nil)") == "nil"
    assert ev("(consp '(1))") == "t"
    assert ev("(atom '(1))") == "nil"
    assert ev("(not 'nil)") == "t"
    assert ev("(not '0)") == "nil"


# frozen rank order: nil < t < integers < other symbols < pairs
LEXORDER_CASES = [
    (("nil", "t"), True),
    (("t", "nil"), False),
    (("t", -5), True),
    ((3, "apple"), True),
    (("apple", 3), False),
    (("apple", "banana"), True),
    ((Cons(1, 2), "zzz"), False),
    ((Cons(1, 2), Cons(1, 3)), True),
    ((Cons(1, 2), Cons(1, 2)), True),
    ((2, 10), True),
]


@pytest.mark.parametrize("pair,expected", LEXORDER_CASES)
def test_lexorder_frozen(pair, expected):
    assert lexorder_le(*pair) is expected


def test_hons_heads(ev):
    al = ev("(hons-acons 'k1 '1 (hons-acons 'k2 '2 'nil))")
    assert al == Cons(Cons("k1", 1), Cons(Cons("k2", 2), "nil"))
    assert ev("(hons-get 'k2 (hons-acons 'k1 '1 (hons-acons 'k2 '2 'nil)))") == Cons("k2", 2)
    assert ev("(hons-get 'zz (hons-acons 'k1 '1 'nil))") == "nil"
    assert ev("(fast-alist-free '(1 2))") == Cons(1, Cons(2, "nil"))


def test_if_is_lazy(reg):
    # the untaken branch may contain an unknown function
    t = parse_term("(if 't '1 (mystery x))")
    assert eval_term(t, {}, reg) == 1
    with pytest.raises(UnknownFunctionError):
        eval_term(parse_term("(if 'nil '1 (mystery x))"), {"x": 1}, reg)


def test_env_and_errors(reg):
    assert eval_term(Var("v"), {"v": 9}, reg) == 9
    with pytest.raises(UnboundVariableError):
        eval_term(Var("v"), {}, reg)
    with pytest.raises(UnknownFunctionError):
        eval_term(parse_term("(frobnicate '1)"), {}, reg)


def test_wrappers_are_identity(reg):
    rng = rand_rng(13)
    for _ in range(300):
        t = rand_term(rng, 3)
        env = {v: rng.randint(-9, 9) for v in ("a", "b", "c")}
        try:
            base = eval_term(t, env, reg)
        except (UnknownFunctionError, EvalDomainError):
            continue
        assert eval_term(mk_rp("integerp", t), env, reg) == base
        assert eval_term(App("hide", (t,)), env, reg) == base


def test_falist_evals_as_payload(reg):
    t = parse_term("(falist '((k . '1)) (cons (cons 'k '1) 'nil))")
    assert eval_term(t, {}, reg) == Cons(Cons("k", 1), "nil")


def test_list_head(reg):
    assert eval_term(parse_term("(list '1 '2)"), {}, reg) == Cons(1, Cons(2, "nil"))


def test_lambda_app_eval(reg):
    t = parse_term("((lambda (x y) (binary-+ x y)) '3 a)")
    assert eval_term(t, {"a": 4}, reg) == 7


def test_registry_copy_and_enable():
    reg = default_registry()
    cp = reg.copy()
    cp.set_enabled("binary-+", False)
    assert not cp.is_enabled("binary-+")
    assert reg.is_enabled("binary-+")
    # disabling only gates the rewriter's exec step; eval still works
    assert eval_term(parse_term("(binary-+ '1 '2)"), {}, cp) == 3


def test_registry_register_and_arity():
    reg = ExecRegistry()
    reg.register("twice", 1, lambda v: ifix(v) * 2)
    assert reg.has("twice")
    assert reg.arity("twice") == 1
    assert reg.call("twice", [21]) == 42
