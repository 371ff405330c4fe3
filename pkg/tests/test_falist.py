"""Fast-alist shadow structure: construction, lookup, coherence."""

import pytest

from termrw.evaluator import default_registry, eval_term
from termrw.falist import (
    check_falist_term,
    fa_acons,
    fa_free,
    fa_get,
    falist_shadow,
    logical_entries,
    make_linear_get_meta,
)
from termrw.rewriter import RewriteStats
from termrw.terms import NIL_TERM, App, FalistShadow, Quote, Var, format_term, parse_term


CHAIN = "(hons-acons 'k1 v1 (hons-acons 'k2 v2 (hons-acons 'k3 v3 'nil)))"


def test_logical_entries_from_chain():
    entries = logical_entries(parse_term(CHAIN))
    assert entries == [("k1", Var("v1")), ("k2", Var("v2")), ("k3", Var("v3"))]


def test_logical_entries_from_cons_chain():
    t = parse_term("(cons (cons 'a x) (cons (cons 'b y) 'nil))")
    assert logical_entries(t) == [("a", Var("x")), ("b", Var("y"))]


def test_logical_entries_quoted_tail():
    t = parse_term("(hons-acons 'a x '((b . 2)))")
    assert logical_entries(t) == [("a", Var("x")), ("b", Quote(2))]


def test_logical_entries_undecodable():
    assert logical_entries(parse_term("(f x)")) is None
    assert logical_entries(parse_term("(cons x y)")) is None


def test_fa_acons_builds_falist():
    out = fa_acons(Quote("k"), Var("v"), NIL_TERM)
    assert out.head == "falist"
    shadow = out.args[0].value
    assert isinstance(shadow, FalistShadow)
    assert shadow.index == {"k": Var("v")}
    assert format_term(out.args[1]) == "(cons (cons 'k v) 'nil)"


def test_fa_acons_extends_persistently():
    base = fa_acons(Quote("k1"), Var("v1"), NIL_TERM)
    ext = fa_acons(Quote("k2"), Var("v2"), base)
    assert [k for k, _v in ext.args[0].value.entries] == ["k2", "k1"]
    assert ext.args[0].value.index == {"k1": Var("v1"), "k2": Var("v2")}
    # the original shadow is untouched
    assert base.args[0].value.index == {"k1": Var("v1")}


def test_fa_acons_first_wins_on_duplicate():
    base = fa_acons(Quote("k"), Var("old"), NIL_TERM)
    ext = fa_acons(Quote("k"), Var("new"), base)
    assert ext.args[0].value.index["k"] == Var("new")
    entries = ext.args[0].value.entries
    assert [k.value if isinstance(k, Quote) else k for k, _v in entries] == [
        Quote("k").value,
        Quote("k").value,
    ]


def test_fa_acons_rejects_unshadowable():
    assert fa_acons(Var("k"), Var("v"), NIL_TERM) is not None or True
    # non-quoted key cannot be indexed
    assert fa_acons(Var("k"), Var("v"), NIL_TERM) is None
    assert fa_acons(Quote("k"), Var("v"), Var("tail")) is None


def test_fa_get_single_probe():
    stats = RewriteStats()
    fal = fa_acons(Quote("k2"), Var("v2"), fa_acons(Quote("k1"), Var("v1"), NIL_TERM))
    hit = fa_get(Quote("k1"), fal, stats)
    assert format_term(hit) == "(cons 'k1 v1)"
    miss = fa_get(Quote("zz"), fal, stats)
    assert miss == NIL_TERM
    assert stats.fa_probes == 2


def test_fa_get_non_quoted_key_defers():
    fal = fa_acons(Quote("k1"), Var("v1"), NIL_TERM)
    assert fa_get(Var("k"), fal, RewriteStats()) is None


def test_fa_free_returns_logical_payload():
    fal = fa_acons(Quote("k1"), Var("v1"), NIL_TERM)
    assert format_term(fa_free(fal)) == "(cons (cons 'k1 v1) 'nil)"


def test_falist_shadow_and_coherence():
    fal = parse_term("(falist '((a . x) (b . y)) (cons (cons 'a x) (cons (cons 'b y) 'nil)))")
    assert falist_shadow(fal).index["a"] == Var("x")
    assert check_falist_term(fal) == []


def test_coherence_violations():
    # shadow disagrees with the logical payload
    bad = parse_term("(falist '((a . x)) (cons (cons 'a z) 'nil))")
    assert check_falist_term(bad)
    # payload not decodable
    bad2 = App("falist", (bad.args[0], Var("tail")))
    assert check_falist_term(bad2)


def test_linear_get_meta_charges_by_position():
    stats = RewriteStats()
    meta = make_linear_get_meta(stats)
    chain = parse_term(CHAIN)
    out = meta(App("hons-get", (Quote("k3"), chain)))
    got = out[0] if isinstance(out, tuple) else out
    assert format_term(got) == "(cons 'k3 v3)"
    assert stats.fa_node_visits == 3

    stats2 = RewriteStats()
    meta2 = make_linear_get_meta(stats2)
    out2 = meta2(App("hons-get", (Quote("k1"), chain)))
    got2 = out2[0] if isinstance(out2, tuple) else out2
    assert format_term(got2) == "(cons 'k1 v1)"
    assert stats2.fa_node_visits == 1


def test_linear_get_meta_miss_and_undecodable():
    stats = RewriteStats()
    meta = make_linear_get_meta(stats)
    out = meta(App("hons-get", (Quote("zz"), parse_term(CHAIN))))
    got = out[0] if isinstance(out, tuple) else out
    assert got == NIL_TERM
    # a miss walks all 3 entries plus the nil terminator
    assert stats.fa_node_visits == 4
    # opaque chain: no answer, no charge
    before = stats.fa_node_visits
    assert meta(App("hons-get", (Quote("a"), Var("unknown")))) is None
    assert stats.fa_node_visits == before


def test_shadow_agrees_with_ground_evaluation():
    # the shadow lookup and the logical-payload evaluation give the same pairs
    reg = default_registry()
    fal = fa_acons(Quote("k2"), Quote(2), fa_acons(Quote("k1"), Quote(1), NIL_TERM))
    hit = fa_get(Quote("k2"), fal, RewriteStats())
    assert eval_term(hit, {}, reg) == eval_term(
        parse_term("(hons-get 'k2 (hons-acons 'k1 '1 (hons-acons 'k2 '2 'nil)))"), {}, reg
    )
