"""Shadowing fast-alist support.

A term ``(falist 'shadow logical)`` evaluates as its logical payload, a
quoted-key association-list term, while the quoted shadow carries the same
entries in a lookup table.  hons-acons extends both sides, hons-get answers
from the shadow in one probe, fast-alist-free drops back to the payload.
The shadow is persistent: extending never mutates an existing one, so older
falist terms stay valid.
"""

from __future__ import annotations

from .terms import (
    NIL,
    NIL_TERM,
    App,
    Cons,
    FalistShadow,
    Quote,
    is_falist,
    terms_equal,
    values_equal,
)


def _alist_value_entries(value):
    """Decode a proper alist value into (key, value-as-Quote) pairs, or None."""
    entries = []
    while isinstance(value, Cons):
        pair = value.car
        if not isinstance(pair, Cons):
            return None
        entries.append((pair.car, Quote(pair.cdr)))
        value = value.cdr
    if not (isinstance(value, str) and value == NIL):
        return None
    return entries


def logical_entries(t):
    """Decode the logical side of a falist into (key, value-term) pairs.

    Accepts cons/hons-acons applications with quoted keys and a quoted-alist
    or 'nil tail.  Returns None when the term is not such a chain.
    """
    entries = []
    while True:
        if isinstance(t, Quote):
            tail = _alist_value_entries(t.value)
            if tail is None:
                return None
            entries.extend(tail)
            return entries
        if isinstance(t, App) and t.head == "cons" and len(t.args) == 2:
            pair = t.args[0]
            if isinstance(pair, App) and pair.head == "cons" and len(pair.args) == 2 and isinstance(pair.args[0], Quote):
                entries.append((pair.args[0].value, pair.args[1]))
            elif isinstance(pair, Quote) and isinstance(pair.value, Cons):
                entries.append((pair.value.car, Quote(pair.value.cdr)))
            else:
                return None
            t = t.args[1]
        elif isinstance(t, App) and t.head == "hons-acons" and len(t.args) == 3 and isinstance(t.args[0], Quote):
            entries.append((t.args[0].value, t.args[1]))
            t = t.args[2]
        else:
            return None


def falist_shadow(t):
    """The FalistShadow of a falist term, or None."""
    if is_falist(t) and isinstance(t.args[0], Quote) and isinstance(t.args[0].value, FalistShadow):
        return t.args[0].value
    return None


def check_falist_term(t, path=()):
    """Coherence check: shadow entries must mirror the logical chain exactly."""
    violations = []
    if not (isinstance(t, App) and t.head == "falist"):
        return [(path, "not a falist term")]
    if len(t.args) != 2:
        return [(path, "falist must have exactly 2 arguments")]
    shadow = falist_shadow(t)
    if shadow is None:
        return [(path, "falist shadow must be a quoted association-list constant")]
    logical = logical_entries(t.args[1])
    if logical is None:
        return [(path, "falist logical part is not a quoted-key alist chain")]
    if len(logical) != len(shadow.entries):
        return [(path, "falist shadow and logical part differ in length")]
    for i, ((ks, vs), (kl, vl)) in enumerate(zip(shadow.entries, logical)):
        if not values_equal(ks, kl) or not terms_equal(vs, vl):
            violations.append((path, f"falist shadow entry {i} disagrees with the logical part"))
    return violations


def fa_acons(key, val, tail):
    """Extend: (hons-acons key val tail) -> falist term, or None if the shape
    is outside the fast path (unquoted key, undecodable tail)."""
    if not isinstance(key, Quote) or isinstance(key.value, FalistShadow):
        return None
    if isinstance(tail, Quote) and isinstance(tail.value, str) and tail.value == NIL:
        parent_entries = ()
        parent_index = {}
        logical_tail = NIL_TERM
    elif is_falist(tail):
        shadow = falist_shadow(tail)
        if shadow is None:
            return None
        parent_entries = shadow.entries
        parent_index = shadow.index
        logical_tail = tail.args[1]
    elif isinstance(tail, Quote):
        decoded = _alist_value_entries(tail.value)
        if decoded is None:
            return None
        parent_entries = tuple(decoded)
        parent_index = None
        logical_tail = tail
    else:
        return None
    entries = ((key.value, val),) + parent_entries
    if parent_index is None:
        shadow = FalistShadow(entries)
    else:
        index = dict(parent_index)
        index[key.value] = val
        shadow = FalistShadow(entries, index)
    logical = App("cons", (App("cons", (key, val)), logical_tail))
    return App("falist", (Quote(shadow), logical))


def fa_get(key, fal, stats=None):
    """Lookup: (hons-get key fal) -> (cons key val) or 'nil, via one shadow
    probe.  None when not interceptable."""
    if not isinstance(key, Quote) or isinstance(key.value, FalistShadow):
        return None
    shadow = falist_shadow(fal)
    if shadow is None:
        return None
    if stats is not None:
        stats.fa_probes += 1
    val = shadow.index.get(key.value)
    if val is None:
        return NIL_TERM
    return App("cons", (key, val))


def fa_free(fal):
    """Drop the shadow: (fast-alist-free fal) -> the logical payload."""
    if not is_falist(fal):
        return None
    return fal.args[1]


def make_linear_get_meta(stats):
    """Fallback lookup for benchmarking with fast-alists off: parse the term
    representing the alist and scan it, charging stats.fa_node_visits per
    node walked."""

    def linear_get(t):
        if not (isinstance(t, App) and t.head == "hons-get" and len(t.args) == 2):
            return None
        key = t.args[0]
        if not isinstance(key, Quote):
            return None
        visits = 0
        chain = t.args[1]
        while True:
            visits += 1
            entry = None
            if isinstance(chain, Quote):
                value = chain.value
                while isinstance(value, Cons):
                    pair = value.car
                    if not isinstance(pair, Cons):
                        return None
                    if values_equal(pair.car, key.value):
                        stats.fa_node_visits += visits
                        return App("cons", (Quote(pair.car), Quote(pair.cdr)))
                    visits += 1
                    value = value.cdr
                if not (isinstance(value, str) and value == NIL):
                    return None
                stats.fa_node_visits += visits
                return NIL_TERM
            if isinstance(chain, App) and chain.head == "cons" and len(chain.args) == 2:
                pair = chain.args[0]
                if isinstance(pair, App) and pair.head == "cons" and len(pair.args) == 2 and isinstance(pair.args[0], Quote):
                    entry = (pair.args[0].value, pair.args[1])
                elif isinstance(pair, Quote) and isinstance(pair.value, Cons):
                    entry = (pair.value.car, Quote(pair.value.cdr))
                else:
                    return None
                chain = chain.args[1]
            elif isinstance(chain, App) and chain.head == "hons-acons" and len(chain.args) == 3 and isinstance(chain.args[0], Quote):
                entry = (chain.args[0].value, chain.args[1])
                chain = chain.args[2]
            else:
                return None
            if values_equal(entry[0], key.value):
                stats.fa_node_visits += visits
                return App("cons", (Quote(entry[0]), entry[1]))

    return linear_get
