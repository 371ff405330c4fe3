"""Term language core: values, terms, reading, printing, and syntax checks.

Values are the ground s-expression universe: unbounded integers, symbols
(plain Python strings, with ``nil`` doubling as false and the empty list),
and pairs.  Terms are the syntax the rewriter works on: variables, quoted
constants, and function applications.  Lambda applications are accepted by
the reader so that definitions written with ``let``/``let*`` can be
beta-reduced at ingestion; they are not legal rewriter input.
"""

from __future__ import annotations

import re

NIL = "nil"
T = "t"

# Heads with fixed engine-level meaning.  Rewrite rules may not target them.
SPECIAL_HEADS = frozenset({"rp", "falist", "if", "quote", "hide", "list", "synp", "syntaxp"})


class ParseError(ValueError):
    def __init__(self, message, line=None, col=None):
        if line is not None:
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)
        self.line = line
        self.col = col


class BetaReductionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# values


class Cons:
    """A pair of values; proper lists are cons chains ending in nil."""

    __slots__ = ("car", "cdr", "_hash")

    def __init__(self, car, cdr):
        self.car = car
        self.cdr = cdr
        self._hash = (hash(car) * 1000003 ^ hash(cdr) * 8191 ^ 0x436F) & 0x7FFFFFFFFFFFFFFF

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Cons) or other._hash != self._hash:
            return False
        return values_equal(self, other)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return format_value(self)


class FalistShadow:
    """Lookup table stored inside the quoted first argument of a falist term.

    Holds (key value, value term) pairs in list order; on duplicate keys the
    earlier entry wins, mirroring lookup in the cons chain it shadows.  The
    index dict gives the single-probe lookup path.
    """

    __slots__ = ("entries", "index", "_hash")

    def __init__(self, entries, index=None):
        self.entries = tuple(entries)
        if index is None:
            index = {}
            for key, val in self.entries:
                if key not in index:
                    index[key] = val
        self.index = index
        h = 0x51AD0
        for key, val in self.entries:
            h = (h * 2097169 ^ hash(key) ^ hash(val) * 31) & 0x7FFFFFFFFFFFFFFF
        self._hash = h

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FalistShadow) or other._hash != self._hash:
            return False
        return self.entries == other.entries

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return format_value(self)


def values_equal(a, b):
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if isinstance(x, Cons):
            if not isinstance(y, Cons) or x._hash != y._hash:
                return False
            stack.append((x.car, y.car))
            stack.append((x.cdr, y.cdr))
        elif isinstance(x, FalistShadow):
            if not isinstance(y, FalistShadow):
                return False
            if x != y:
                return False
        else:
            if type(x) is not type(y) or x != y:
                return False
    return True


def truthy(value):
    """Everything except the symbol nil is true."""
    return not (isinstance(value, str) and value == NIL)


# ---------------------------------------------------------------------------
# terms


class Term:
    __slots__ = ()

    def __repr__(self):
        return format_term(self)

    def __ne__(self, other):
        return not self.__eq__(other)


class Var(Term):
    __slots__ = ("name", "_hash")

    def __init__(self, name):
        self.name = name
        self._hash = hash(name) ^ 0x564152

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (isinstance(other, Var) and other.name == self.name)


class Quote(Term):
    __slots__ = ("value", "_hash")

    def __init__(self, value):
        self.value = value
        self._hash = hash(value) ^ 0x51554F

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Quote) and other._hash == self._hash and values_equal(other.value, self.value)


class App(Term):
    __slots__ = ("head", "args", "_hash")

    def __init__(self, head, args):
        self.head = head
        args = tuple(args)
        self.args = args
        h = hash(head) ^ 0x415050
        for a in args:
            h = (h * 1000003 ^ a._hash) & 0x7FFFFFFFFFFFFFFF
        self._hash = h

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, App) or other._hash != self._hash:
            return False
        return terms_equal(self, other)


class LambdaApp(Term):
    """A fully applied lambda, ((lambda (params) body) args). Transient: the
    reader produces these and beta_reduce removes them."""

    __slots__ = ("params", "body", "args", "_hash")

    def __init__(self, params, body, args):
        self.params = tuple(params)
        self.body = body
        args = tuple(args)
        self.args = args
        h = hash(self.params) ^ body._hash ^ 0x4C414D
        for a in args:
            h = (h * 1000003 ^ a._hash) & 0x7FFFFFFFFFFFFFFF
        self._hash = h

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, LambdaApp) or other._hash != self._hash:
            return False
        return terms_equal(self, other)


def terms_equal(a, b):
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        cls = x.__class__
        if cls is not y.__class__:
            return False
        if cls is Var:
            if x.name != y.name:
                return False
        elif cls is Quote:
            if not values_equal(x.value, y.value):
                return False
        elif cls is App:
            if x.head != y.head or len(x.args) != len(y.args) or x._hash != y._hash:
                return False
            stack.extend(zip(x.args, y.args))
        elif cls is LambdaApp:
            if x.params != y.params or len(x.args) != len(y.args):
                return False
            stack.append((x.body, y.body))
            stack.extend(zip(x.args, y.args))
        else:
            return False
    return True


NIL_TERM = Quote(NIL)
T_TERM = Quote(T)


def mk_rp(prop, term):
    return App("rp", (Quote(prop), term))


def is_rp(t):
    return isinstance(t, App) and t.head == "rp" and len(t.args) == 2


def rp_prop(t):
    q = t.args[0]
    return q.value if isinstance(q, Quote) else None


def rp_payload(t):
    return t.args[1]


def is_falist(t):
    return isinstance(t, App) and t.head == "falist" and len(t.args) == 2


def strip_rp(t):
    """Remove top-level rp wrappers only."""
    while is_rp(t):
        t = t.args[1]
    return t


def wrapper_props(t):
    """Property symbols of the rp wrapper chain on t, outermost first."""
    props = []
    while is_rp(t):
        props.append(rp_prop(t))
        t = t.args[1]
    return props


def strip_rp_deep(t):
    """Remove every rp wrapper in t, rebuilding only where needed."""
    if isinstance(t, (Var, Quote)):
        return t
    if isinstance(t, App):
        if t.head == "rp" and len(t.args) == 2:
            return strip_rp_deep(t.args[1])
        args = [strip_rp_deep(a) for a in t.args]
        if all(a is b for a, b in zip(args, t.args)):
            return t
        return App(t.head, args)
    if isinstance(t, LambdaApp):
        return LambdaApp(t.params, strip_rp_deep(t.body), [strip_rp_deep(a) for a in t.args])
    return t


def free_vars(t):
    """Free variable names of a term."""
    out = set()
    stack = [(t, frozenset())]
    while stack:
        u, bound = stack.pop()
        if isinstance(u, Var):
            if u.name not in bound:
                out.add(u.name)
        elif isinstance(u, App):
            stack.extend((a, bound) for a in u.args)
        elif isinstance(u, LambdaApp):
            stack.extend((a, bound) for a in u.args)
            stack.append((u.body, bound | set(u.params)))
    return out


def vars_in_order(t):
    """Variable names in depth-first, left-to-right first-appearance order."""
    seen = []
    def go(u):
        if isinstance(u, Var):
            if u.name not in seen:
                seen.append(u.name)
        elif isinstance(u, App):
            for a in u.args:
                go(a)
        elif isinstance(u, LambdaApp):
            for a in u.args:
                go(a)
            go(u.body)
    go(t)
    return seen


def node_count(t):
    n = 0
    stack = [t]
    while stack:
        u = stack.pop()
        n += 1
        if isinstance(u, App):
            stack.extend(u.args)
        elif isinstance(u, LambdaApp):
            stack.extend(u.args)
            stack.append(u.body)
    return n


def subterms(t):
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        if isinstance(u, App):
            stack.extend(u.args)
        elif isinstance(u, LambdaApp):
            stack.extend(u.args)
            stack.append(u.body)


def contains_head(t, head):
    return any(isinstance(u, App) and u.head == head for u in subterms(t))


# ---------------------------------------------------------------------------
# reader


_WS = " \t\r\n"
_DELIM = _WS + "()';"
_INT_RE = re.compile(r"[+-]?[0-9]+\Z")


def _line_col(text, pos):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _tokenize(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in _WS:
            i += 1
        elif c == ";":
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
        elif c in "()'":
            toks.append((c, None, i))
            i += 1
        elif c == "." and (i + 1 == n or text[i + 1] in _DELIM):
            toks.append((".", None, i))
            i += 1
        else:
            j = i
            while j < n and text[j] not in _DELIM:
                j += 1
            word = text[i:j]
            if _INT_RE.match(word):
                toks.append(("atom", int(word), i))
            else:
                toks.append(("atom", word, i))
            i = j
    return toks


class _Reader:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0

    def error(self, message, pos=None):
        if pos is None:
            pos = self.toks[self.k][2] if self.k < len(self.toks) else len(self.text)
        raise ParseError(message, *_line_col(self.text, pos))

    def peek(self):
        return self.toks[self.k] if self.k < len(self.toks) else (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        self.k += 1
        return tok

    def read_datum(self):
        kind, value, pos = self.next()
        if kind == "atom":
            return value
        if kind == "'":
            return Cons("quote", Cons(self.read_datum(), NIL))
        if kind == "(":
            return self.read_list()
        if kind == ")":
            self.error("unexpected )", pos)
        if kind == ".":
            self.error("unexpected .", pos)
        self.error("unexpected end of input", pos)

    def read_list(self):
        items = []
        tail = NIL
        while True:
            kind, _, pos = self.peek()
            if kind is None:
                self.error("unterminated list", pos)
            if kind == ")":
                self.next()
                break
            if kind == ".":
                self.next()
                if not items:
                    self.error("misplaced .", pos)
                tail = self.read_datum()
                kind2, _, pos2 = self.next()
                if kind2 != ")":
                    self.error("expected ) after dotted tail", pos2)
                break
            items.append(self.read_datum())
        for item in reversed(items):
            tail = Cons(item, tail)
        return tail


def read_value(text):
    """Read exactly one s-expression from text into the value domain."""
    r = _Reader(text)
    if r.peek()[0] is None:
        r.error("empty input")
    v = r.read_datum()
    if r.peek()[0] is not None:
        r.error("trailing input after s-expression")
    return v


def read_values(text):
    r = _Reader(text)
    out = []
    while r.peek()[0] is not None:
        out.append(r.read_datum())
    return out


def list_items(v):
    """Items of a proper list value; raises ParseError on a dotted tail."""
    items = []
    while isinstance(v, Cons):
        items.append(v.car)
        v = v.cdr
    if v != NIL:
        raise ParseError("expected a proper list")
    return items


# ---------------------------------------------------------------------------
# value -> term

_EXPANSIONS = {"+": "binary-+", "logand": "binary-logand"}


def _fold_binary(head, args):
    out = args[-1]
    for a in reversed(args[:-1]):
        out = App(head, (a, out))
    return out


def term_from_value(v, keep_boolean_ops=False):
    """Translate a raw s-expression value into a term.

    Integers, t and nil self-quote; other symbols are variables.  The n-ary
    surface forms +, -, logand, and, or, implies expand into their fixed-arity
    function counterparts, and let/let* into lambda applications.  With
    keep_boolean_ops true, and/or are kept as plain applications; the syntaxp
    evaluator interprets them directly.
    """
    if isinstance(v, int):
        return Quote(v)
    if isinstance(v, str):
        if v in (NIL, T):
            return Quote(v)
        return Var(v)
    if isinstance(v, FalistShadow):
        raise ParseError("lookup-table constant cannot appear as a term")
    if not isinstance(v, Cons):
        raise ParseError(f"cannot read term from {v!r}")

    head = v.car
    if isinstance(head, Cons):
        if head.car != "lambda":
            raise ParseError("application head must be a symbol or lambda")
        parts = list_items(head.cdr)
        if len(parts) != 2:
            raise ParseError("lambda expects a parameter list and a body")
        params = list_items(parts[0])
        if not all(isinstance(p, str) and p not in (NIL, T) for p in params):
            raise ParseError("lambda parameters must be plain symbols")
        body = term_from_value(parts[1], keep_boolean_ops)
        args = [term_from_value(a, keep_boolean_ops) for a in list_items(v.cdr)]
        if len(args) != len(params):
            raise ParseError("lambda applied to the wrong number of arguments")
        return LambdaApp(params, body, args)

    if not isinstance(head, str) or head == NIL:
        raise ParseError("application head must be a symbol")

    if head == "quote":
        items = list_items(v.cdr)
        if len(items) != 1:
            raise ParseError("quote expects exactly one argument")
        return Quote(items[0])

    if head in ("let", "let*"):
        parts = list_items(v.cdr)
        if len(parts) != 2:
            raise ParseError(f"{head} expects a binding list and a body")
        bindings = []
        for b in list_items(parts[0]):
            pair = list_items(b)
            if len(pair) != 2 or not isinstance(pair[0], str):
                raise ParseError(f"bad {head} binding")
            bindings.append((pair[0], term_from_value(pair[1], keep_boolean_ops)))
        body = term_from_value(parts[1], keep_boolean_ops)
        if head == "let":
            if not bindings:
                return body
            names = [n for n, _ in bindings]
            return LambdaApp(names, body, [e for _, e in bindings])
        out = body
        for name, expr in reversed(bindings):
            out = LambdaApp((name,), out, (expr,))
        return out

    raw_args = list_items(v.cdr)
    args = [term_from_value(a, keep_boolean_ops) for a in raw_args]

    if head in _EXPANSIONS:
        if len(args) < 2:
            raise ParseError(f"{head} expects at least 2 arguments")
        return _fold_binary(_EXPANSIONS[head], args)
    if head == "-":
        if len(args) == 1:
            return App("unary--", args)
        if len(args) == 2:
            return App("binary-+", (args[0], App("unary--", (args[1],))))
        raise ParseError("- expects 1 or 2 arguments")
    if not keep_boolean_ops and head in ("and", "or", "implies"):
        if head == "and":
            if not args:
                return T_TERM
            out = args[-1]
            for a in reversed(args[:-1]):
                out = App("if", (a, out, NIL_TERM))
            return out
        if head == "or":
            if not args:
                return NIL_TERM
            out = args[-1]
            for a in reversed(args[:-1]):
                out = App("if", (a, a, out))
            return out
        if len(args) != 2:
            raise ParseError("implies expects 2 arguments")
        return App("if", (args[0], App("if", (args[1], T_TERM, NIL_TERM)), T_TERM))

    if head == "falist":
        if len(args) != 2:
            raise ParseError("falist expects 2 arguments")
        shadow_q = args[0]
        if not isinstance(shadow_q, Quote):
            raise ParseError("falist shadow must be a quoted alist")
        if not isinstance(shadow_q.value, FalistShadow):
            entries = []
            for pair in list_items(shadow_q.value):
                if not isinstance(pair, Cons):
                    raise ParseError("falist shadow entries must be pairs")
                entries.append((pair.car, term_from_value(pair.cdr)))
            shadow_q = Quote(FalistShadow(entries))
        return App("falist", (shadow_q, args[1]))

    return App(head, args)


def term_to_value(t):
    """Encode a term as a value, the usual terms-as-lists embedding."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Quote):
        return Cons("quote", Cons(t.value, NIL))
    if isinstance(t, App):
        out = NIL
        for a in reversed(t.args):
            out = Cons(term_to_value(a), out)
        return Cons(t.head, out)
    if isinstance(t, LambdaApp):
        params = NIL
        for p in reversed(t.params):
            params = Cons(p, params)
        lam = Cons("lambda", Cons(params, Cons(term_to_value(t.body), NIL)))
        out = NIL
        for a in reversed(t.args):
            out = Cons(term_to_value(a), out)
        return Cons(lam, out)
    raise TypeError(t)


def parse_term(text):
    return term_from_value(read_value(text))


# ---------------------------------------------------------------------------
# printer


def format_value(v):
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return v
    if isinstance(v, FalistShadow):
        inner = " ".join(f"({format_value(k)} . {format_term(t)})" for k, t in v.entries)
        return f"({inner})"
    if isinstance(v, Cons):
        if v.car == "quote" and isinstance(v.cdr, Cons) and v.cdr.cdr == NIL:
            return "'" + format_value(v.cdr.car)
        parts = []
        while isinstance(v, Cons):
            parts.append(format_value(v.car))
            v = v.cdr
        if v == NIL:
            return "(" + " ".join(parts) + ")"
        return "(" + " ".join(parts) + " . " + format_value(v) + ")"
    raise TypeError(v)


def format_term(t):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Quote):
        return "'" + format_value(t.value)
    if isinstance(t, App):
        if not t.args:
            return f"({t.head})"
        return f"({t.head} " + " ".join(format_term(a) for a in t.args) + ")"
    if isinstance(t, LambdaApp):
        lam = f"(lambda ({' '.join(t.params)}) {format_term(t.body)})"
        if not t.args:
            return f"({lam})"
        return f"({lam} " + " ".join(format_term(a) for a in t.args) + ")"
    raise TypeError(t)


print_term = format_term


# ---------------------------------------------------------------------------
# syntax check


def rp_termp(t):
    """Well-formedness check for rewriter input; returns (path, message) violations.

    Checks: leaves are non-nil variable symbols or quoted constants, rp
    wrappers take a quoted non-nil property symbol and exactly one payload,
    falist shadows agree with their logical alist, and every application head
    is a plain symbol (no lambdas).
    """
    violations = []

    def go(u, path):
        if isinstance(u, Var):
            if u.name == NIL:
                violations.append((path, "nil cannot be a variable"))
        elif isinstance(u, Quote):
            pass
        elif isinstance(u, LambdaApp):
            violations.append((path, "lambda heads not allowed"))
        elif isinstance(u, App):
            if u.head == "rp":
                if len(u.args) != 2:
                    violations.append((path, "rp must have exactly 2 arguments"))
                    return
                prop = u.args[0]
                if not (isinstance(prop, Quote) and isinstance(prop.value, str) and prop.value != NIL):
                    violations.append((path, "rp first argument must be a quoted non-nil symbol"))
                go(u.args[1], path + (1,))
            elif u.head == "falist":
                from . import falist as _falist

                violations.extend(_falist.check_falist_term(u, path))
                if len(u.args) == 2:
                    go(u.args[1], path + (1,))
            else:
                for i, a in enumerate(u.args):
                    go(a, path + (i,))
        else:
            violations.append((path, f"not a term: {u!r}"))

    go(t, ())
    return violations


# ---------------------------------------------------------------------------
# beta reduction and list translation


def _fresh_name(base, taken):
    k = 1
    while f"{base}~{k}" in taken:
        k += 1
    return f"{base}~{k}"


def substitute(t, sub):
    """Capture-free substitution of terms for variable names."""
    if isinstance(t, Var):
        return sub.get(t.name, t)
    if isinstance(t, Quote):
        return t
    if isinstance(t, App):
        return App(t.head, [substitute(a, sub) for a in t.args])
    if isinstance(t, LambdaApp):
        args = [substitute(a, sub) for a in t.args]
        inner = {k: v for k, v in sub.items() if k not in t.params}
        if not inner:
            return LambdaApp(t.params, t.body, args)
        incoming = set()
        for v in inner.values():
            incoming |= free_vars(v)
        params = list(t.params)
        body = t.body
        clashes = [p for p in params if p in incoming]
        if clashes:
            taken = incoming | free_vars(body) | set(params)
            renames = {}
            for p in clashes:
                fresh = _fresh_name(p, taken)
                taken.add(fresh)
                renames[p] = Var(fresh)
            body = substitute(body, renames)
            params = [renames[p].name if p in renames else p for p in params]
        return LambdaApp(params, substitute(body, inner), args)
    raise TypeError(t)


def beta_reduce(t):
    """Remove lambda applications, innermost first."""
    if isinstance(t, (Var, Quote)):
        return t
    if isinstance(t, App):
        args = [beta_reduce(a) for a in t.args]
        if all(a is b for a, b in zip(args, t.args)):
            return t
        return App(t.head, args)
    if isinstance(t, LambdaApp):
        args = [beta_reduce(a) for a in t.args]
        body = beta_reduce(t.body)
        if len(args) != len(t.params):
            raise BetaReductionError("lambda applied to the wrong number of arguments")
        return substitute(body, dict(zip(t.params, args)))
    raise TypeError(t)


def trans_list(t):
    """Translate every (list ...) into its right-nested cons form."""
    if isinstance(t, (Var, Quote)):
        return t
    if isinstance(t, App):
        args = [trans_list(a) for a in t.args]
        if t.head == "list":
            out = NIL_TERM
            for a in reversed(args):
                out = App("cons", (a, out))
            return out
        if all(a is b for a, b in zip(args, t.args)):
            return t
        return App(t.head, args)
    if isinstance(t, LambdaApp):
        return LambdaApp(t.params, trans_list(t.body), [trans_list(a) for a in t.args])
    raise TypeError(t)
