"""The rewrite loop.

Each call runs the step sequence: stop on dont-rw, try context reduction in
iff positions, strengthen from context facts, rewrite arguments (expanding
the context through if), try the executable counterpart, fast-alist
interception, meta rules, then rewrite rules; rule and meta hits recurse
with a dont-rw derived from the produced template so freshly substituted
bindings are not rewritten again.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import falist as _falist
from .evaluator import EvalDomainError, UnknownFunctionError, lexorder_le, default_registry
from .meta import MetaRegistry
from .rules import RuleSet, Syntaxp, build_ruleset
from .terms import (
    NIL,
    NIL_TERM,
    T_TERM,
    App,
    LambdaApp,
    Quote,
    Term,
    Var,
    beta_reduce,
    is_rp,
    mk_rp,
    node_count,
    strip_rp,
    strip_rp_deep,
    term_to_value,
    terms_equal,
    truthy,
    values_equal,
    wrapper_props,
)


# ---------------------------------------------------------------------------
# dont-rw


class DontRw:
    __slots__ = ()


class Leaf(DontRw):
    __slots__ = ("stop",)

    def __init__(self, stop):
        self.stop = stop

    def __repr__(self):
        return "STOP" if self.stop else "OPEN"


class Node(DontRw):
    __slots__ = ("children",)

    def __init__(self, children):
        self.children = tuple(children)

    def __repr__(self):
        return f"({' '.join(map(repr, self.children))})"


STOP = Leaf(True)
OPEN = Leaf(False)


def dont_rw_from_value(v):
    """Mirror an s-expression: non-nil atoms stop, nil rewrites, a list maps
    elementwise (position 0 tracks the head)."""
    from .terms import Cons

    if isinstance(v, Cons):
        children = []
        while isinstance(v, Cons):
            children.append(dont_rw_from_value(v.car))
            v = v.cdr
        return Node(children)
    if isinstance(v, str) and v == NIL:
        return OPEN
    return STOP


def dont_rw_from_template(template):
    """dont-rw for an instantiated rule rhs or hyp: variable positions hold
    already-rewritten bindings (stop), the template structure stays open."""
    if isinstance(template, Var):
        return STOP
    if isinstance(template, Quote):
        return STOP
    if isinstance(template, App):
        return Node((STOP,) + tuple(dont_rw_from_template(a) for a in template.args))
    return OPEN


def arg_dont_rws(dw, nargs):
    """Per-argument dont-rw slices; malformed shapes degrade to rewrite-all."""
    if isinstance(dw, Node):
        if len(dw.children) == nargs + 1:
            return dw.children[1:]
        return (OPEN,) * nargs
    return (OPEN,) * nargs


# ---------------------------------------------------------------------------
# context


class Context:
    """Facts known true at this point, stored wrapper-stripped.

    Supports membership, negation lookup, and prop-of-subject queries for
    the strengthening step.  'Facts' that are literally 't are dropped;
    negatives are held as (not x).
    """

    __slots__ = ("facts", "_members", "_negs", "_props")

    def __init__(self, facts=()):
        seen = []
        members = set()
        for f in facts:
            if isinstance(f, Quote) and truthy(f.value):
                continue
            if f not in members:
                members.add(f)
                seen.append(f)
        self.facts = tuple(seen)
        self._members = members
        negs = set()
        props = {}
        for f in seen:
            if isinstance(f, App) and len(f.args) == 1:
                if f.head == "not":
                    negs.add(f.args[0])
                else:
                    props.setdefault(f.args[0], []).append(f.head)
        self._negs = negs
        self._props = props

    @staticmethod
    def from_terms(terms):
        return Context([strip_rp_deep(t) for t in terms])

    def extend(self, new_facts):
        stripped = [strip_rp_deep(t) for t in new_facts]
        stripped = [t for t in stripped if t not in self._members]
        if not stripped:
            return self
        return Context(self.facts + tuple(stripped))

    def contains(self, stripped_t):
        return stripped_t in self._members

    def contains_negation(self, stripped_t):
        return stripped_t in self._negs

    def props_of(self, stripped_t):
        return self._props.get(stripped_t, ())

    def __len__(self):
        return len(self.facts)

    def __repr__(self):
        return f"Context({list(self.facts)!r})"


def conjuncts_of(t):
    """Split an and-shaped term (if a b 'nil) into its conjuncts."""
    out = []
    while isinstance(t, App) and t.head == "if" and len(t.args) == 3 and terms_equal(t.args[2], NIL_TERM):
        out.append(t.args[0])
        t = t.args[1]
    out.append(t)
    return out


def negate(t):
    stripped = strip_rp_deep(t)
    if isinstance(stripped, App) and stripped.head == "not" and len(stripped.args) == 1:
        return stripped.args[0]
    return App("not", (stripped,))


# ---------------------------------------------------------------------------
# config and stats


@dataclass
class RewriteConfig:
    step_limit: int = 1 << 20
    backchain_depth: int = 1000
    iff_top: bool = True
    side_conditions_enabled: bool = True
    fast_alist_enabled: bool = True
    trace: bool = False


@dataclass
class RewriteStats:
    rewrite_calls: int = 0
    rule_attempts: int = 0
    rule_applications: int = 0
    hyp_relief_failures: int = 0
    exec_evals: int = 0
    exec_domain_errors: int = 0
    meta_applications: int = 0
    meta_rejections: int = 0
    nodes_created: int = 0
    fa_probes: int = 0
    fa_node_visits: int = 0
    step_limit_hit: bool = False

    def as_dict(self):
        return dict(self.__dict__)


class UnifyFail(Exception):
    pass


_FAIL = UnifyFail()


def unify(pattern, t, bindings=None, extracted=None):
    """Match pattern (no rp/falist inside) against t, looking through rp
    wrappers.  Returns (bindings, extracted) or None; bindings keep the
    wrappers of the matched subterms, extracted lists (wrapped-subterm,
    prop) for every wrapper looked through.  Repeated pattern variables
    must match wrapper-stripped-equal subterms.
    """
    if bindings is None:
        bindings = {}
    if extracted is None:
        extracted = []
    try:
        _unify(pattern, t, bindings, extracted)
    except UnifyFail:
        return None
    return bindings, extracted


def _unify(pattern, t, bindings, extracted):
    if isinstance(pattern, Var):
        old = bindings.get(pattern.name)
        if old is None:
            bindings[pattern.name] = t
        elif not terms_equal(strip_rp_deep(old), strip_rp_deep(t)):
            raise _FAIL
        return
    while is_rp(t):
        prop = t.args[0].value
        extracted.append((t, prop))
        t = t.args[1]
    if isinstance(pattern, Quote):
        if not (isinstance(t, Quote) and values_equal(pattern.value, t.value)):
            raise _FAIL
        return
    if isinstance(pattern, App):
        if not (isinstance(t, App) and t.head == pattern.head and len(t.args) == len(pattern.args)):
            raise _FAIL
        for p, a in zip(pattern.args, t.args):
            _unify(p, a, bindings, extracted)
        return
    raise _FAIL


def instantiate(template, bindings):
    if isinstance(template, Var):
        return bindings[template.name]
    if isinstance(template, Quote):
        return template
    if isinstance(template, App):
        return App(template.head, [instantiate(a, bindings) for a in template.args])
    raise TypeError(template)


def _template_size(template):
    """Nodes an instantiation constructs (everything but variable slots)."""
    n = 0
    stack = [template]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            continue
        n += 1
        if isinstance(u, App):
            stack.extend(u.args)
    return n


class SyntaxpError(ValueError):
    pass


_SYNTAXP_HEADS = frozenset({"and", "or", "not", "equal", "atom", "consp", "quotep", "lexorder", "car"})


def syntaxp_eval(pred, bindings):
    """Evaluate a syntaxp predicate over the terms bound by unification,
    encoded as values; wrappers are stripped first so both plain and
    side-condition-carrying occurrences order the same way."""

    def ev(p):
        if isinstance(p, Var):
            b = bindings.get(p.name)
            if b is None:
                raise SyntaxpError(f"syntaxp variable {p.name} is unbound")
            return term_to_value(strip_rp_deep(b))
        if isinstance(p, Quote):
            return p.value
        if not isinstance(p, App) or p.head not in _SYNTAXP_HEADS:
            raise SyntaxpError(f"unsupported syntaxp predicate {p!r}")
        head, args = p.head, p.args
        if head == "and":
            for a in args:
                if not truthy(ev(a)):
                    return NIL
            return "t"
        if head == "or":
            for a in args:
                v = ev(a)
                if truthy(v):
                    return v
            return NIL
        if head == "not":
            return NIL if truthy(ev(args[0])) else "t"
        if head == "equal":
            return "t" if values_equal(ev(args[0]), ev(args[1])) else NIL
        if head == "atom":
            from .terms import Cons

            return NIL if isinstance(ev(args[0]), Cons) else "t"
        if head == "consp":
            from .terms import Cons

            return "t" if isinstance(ev(args[0]), Cons) else NIL
        if head == "quotep":
            from .terms import Cons

            v = ev(args[0])
            return "t" if isinstance(v, Cons) and v.car == "quote" else NIL
        if head == "lexorder":
            return "t" if lexorder_le(ev(args[0]), ev(args[1])) else NIL
        if head == "car":
            from .terms import Cons

            v = ev(args[0])
            return v.car if isinstance(v, Cons) else NIL
        raise SyntaxpError(head)

    return truthy(ev(pred))


_FA_HEADS = frozenset({"hons-acons", "hons-get", "fast-alist-free"})


class Rewriter:
    """One rewriting engine instance: rule set, executable registry, metas,
    configuration, and accumulated statistics."""

    def __init__(self, ruleset=None, registry=None, metas=None, cfg=None, stats=None):
        self.ruleset = ruleset if ruleset is not None else build_ruleset([])
        reg = (registry if registry is not None else default_registry()).copy()
        for fn in self.ruleset.exec_disabled:
            if reg.has(fn):
                reg.set_enabled(fn, False)
        self.registry = reg
        self.metas = metas if metas is not None else MetaRegistry()
        self.cfg = cfg if cfg is not None else RewriteConfig()
        self.stats = stats if stats is not None else RewriteStats()
        self.trace = []
        self.meta_diagnostics = []
        self._backchain = 0
        self._template_sizes = {}

    # -- public entry -------------------------------------------------------

    def rewrite(self, t, dont_rw=OPEN, ctx=(), iff=None):
        if not isinstance(ctx, Context):
            ctx = Context.from_terms(ctx)
        if iff is None:
            iff = self.cfg.iff_top
        if isinstance(t, LambdaApp):
            t = beta_reduce(t)
        return self._rw(t, dont_rw, ctx, iff, ())

    def proved(self, t, ctx=()):
        out = self.rewrite(t, OPEN, ctx, iff=True)
        return isinstance(out, Quote) and truthy(out.value), out

    # -- the step loop ------------------------------------------------------

    def _rw(self, t, dw, ctx, iff, path):
        stats = self.stats
        if stats.rewrite_calls >= self.cfg.step_limit:
            stats.step_limit_hit = True
            return t
        stats.rewrite_calls += 1

        # (1) dont-rw stop
        if isinstance(dw, Leaf) and dw.stop:
            return t
        if isinstance(t, Quote):
            return t
        if isinstance(t, Var):
            if iff:
                r = self._reduce_by_context(t, ctx)
                if r is not None:
                    return r
            return t
        if isinstance(t, LambdaApp):
            return self._rw(beta_reduce(t), OPEN, ctx, iff, path)

        # (2) iff-context reduction on the whole (possibly wrapped) term
        if iff:
            r = self._reduce_by_context(t, ctx)
            if r is not None:
                return r

        # peel rp wrappers; the core is processed and the props re-applied
        props = []
        core = t
        while is_rp(core):
            props.append(core.args[0].value)
            dw = arg_dont_rws(dw, 2)[1] if isinstance(dw, Node) else dw
            core = core.args[1]
        if isinstance(core, Quote):
            return t
        if isinstance(core, Var):
            return t

        # (3) strengthen from context facts about this very term
        if self.cfg.side_conditions_enabled and ctx._props and core.head not in ("if", "falist"):
            stripped = strip_rp_deep(core)
            for p in ctx.props_of(stripped):
                if p not in props:
                    props.append(p)

        if core.head == "falist":
            return self._rewrap(props, core)

        out = self._steps_4_to_7(core, dw, ctx, iff, props, path)
        return self._rewrap(props, out)

    def _rewrap(self, props, core):
        existing = wrapper_props(core)
        for p in reversed(props):
            if p not in existing:
                core = mk_rp(p, core)
                existing.append(p)
                self.stats.nodes_created += 2
        return core

    def _steps_4_to_7(self, core, dw, ctx, iff, outer_props, path):
        stats = self.stats
        head = core.head

        # (4) argument rewriting, if-aware
        if head == "if" and len(core.args) == 3:
            return self._rewrite_if(core, dw, ctx, iff, path)

        dws = arg_dont_rws(dw, len(core.args))
        if head == "hide":
            dws = (STOP,) * len(core.args)
        arg_iff = iff if head == "not" and len(core.args) == 1 else False
        args = tuple(
            self._rw(a, adw, ctx, arg_iff, path + (i + 1,))
            for i, (a, adw) in enumerate(zip(core.args, dws))
        )
        if any(a is not b for a, b in zip(args, core.args)):
            core = App(head, args)
            stats.nodes_created += 1
            if iff:
                r = self._reduce_by_context(core, ctx)
                if r is not None:
                    return r

        # (5) executable counterpart
        if core.args and all(isinstance(a, Quote) for a in core.args) and self.registry.is_enabled(head):
            try:
                value = self.registry.call(head, [a.value for a in core.args])
                stats.exec_evals += 1
                stats.nodes_created += 1
                return Quote(value)
            except EvalDomainError:
                stats.exec_domain_errors += 1
            except UnknownFunctionError:
                pass

        # (5b) fast-alist interception
        if self.cfg.fast_alist_enabled and head in _FA_HEADS:
            fa = self._apply_falist(core)
            if fa is not None:
                return fa

        # (6) meta rules
        m = self.metas.apply(core, stats, self.meta_diagnostics)
        if m is not None:
            new_t, new_dw = m
            return self._rw(new_t, new_dw if new_dw is not None else OPEN, ctx, iff, path)

        # (7) rewrite rules
        r = self._apply_rules(core, ctx, iff, outer_props, path)
        if r is not None:
            new_t, new_dw = r
            return self._rw(new_t, new_dw, ctx, iff, path)
        return core

    # -- step helpers --------------------------------------------------------

    def _reduce_by_context(self, t, ctx):
        """'t / 'nil when the context or a carried side-condition decides t;
        None otherwise."""
        stripped = strip_rp_deep(t)
        if ctx.contains(stripped):
            return T_TERM
        if ctx.contains_negation(stripped):
            return NIL_TERM
        if isinstance(stripped, App) and stripped.head == "not" and len(stripped.args) == 1:
            if ctx.contains(stripped.args[0]):
                return NIL_TERM
        if self.cfg.side_conditions_enabled:
            u = strip_rp(t)
            if isinstance(u, App) and len(u.args) == 1 and u.head in wrapper_props(u.args[0]):
                return T_TERM
        return None

    def _rewrite_if(self, core, dw, ctx, iff, path):
        dws = arg_dont_rws(dw, 3)
        test = self._rw(core.args[0], dws[0], ctx, True, path + (1,))
        if isinstance(test, Quote):
            if truthy(test.value):
                return self._rw(core.args[1], dws[1], ctx, iff, path + (2,))
            return self._rw(core.args[2], dws[2], ctx, iff, path + (3,))
        then_ctx = ctx.extend(conjuncts_of(test))
        else_ctx = ctx.extend([negate(test)])
        then = self._rw(core.args[1], dws[1], then_ctx, iff, path + (2,))
        els = self._rw(core.args[2], dws[2], else_ctx, iff, path + (3,))
        if terms_equal(then, els):
            return then
        if test is core.args[0] and then is core.args[1] and els is core.args[2]:
            return core
        self.stats.nodes_created += 1
        return App("if", (test, then, els))

    def _apply_falist(self, core):
        stats = self.stats
        if core.head == "hons-acons" and len(core.args) == 3:
            out = _falist.fa_acons(core.args[0], core.args[1], core.args[2])
            if out is not None:
                stats.nodes_created += 4
            return out
        if core.head == "hons-get" and len(core.args) == 2:
            out = _falist.fa_get(core.args[0], core.args[1], stats)
            if out is not None:
                stats.nodes_created += 1
            return out
        if core.head == "fast-alist-free" and len(core.args) == 1:
            return _falist.fa_free(core.args[0])
        return None

    def _apply_rules(self, core, ctx, iff, outer_props, path):
        stats = self.stats
        candidates = self.ruleset.candidates(core.head)
        if not candidates:
            return None
        for rule in candidates:
            if not rule.enabled:
                continue
            if rule.equiv == "iff" and not iff:
                continue
            stats.rule_attempts += 1
            m = unify(rule.lhs, core)
            if m is None:
                continue
            bindings, extracted = m
            if rule.hyps:
                facts = [App(p, (strip_rp_deep(sub),)) for sub, p in extracted]
                if outer_props:
                    stripped_core = strip_rp_deep(core)
                    facts.extend(App(p, (stripped_core,)) for p in outer_props)
                hyp_ctx = ctx.extend(facts) if (facts and self.cfg.side_conditions_enabled) else ctx
                if not self._relieve_hyps(rule, bindings, hyp_ctx, path):
                    stats.hyp_relief_failures += 1
                    continue
            stats.rule_applications += 1
            template = rule.sc_wrapped_rhs if self.cfg.side_conditions_enabled else rule.rhs
            result = instantiate(template, bindings)
            size = self._template_sizes.get(id(template))
            if size is None:
                size = _template_size(template)
                self._template_sizes[id(template)] = size
            stats.nodes_created += size
            if self.cfg.trace:
                self.trace.append((path, rule.name, node_count(core), node_count(result)))
            return result, dont_rw_from_template(template)
        return None

    def _relieve_hyps(self, rule, bindings, ctx, path):
        if self._backchain >= self.cfg.backchain_depth:
            return False
        self._backchain += 1
        try:
            for hyp in rule.hyps:
                if isinstance(hyp, Syntaxp):
                    try:
                        if not syntaxp_eval(hyp.pred, bindings):
                            return False
                    except SyntaxpError:
                        return False
                    continue
                inst = instantiate(hyp, bindings)
                self.stats.nodes_created += self._template_sizes.setdefault(id(hyp), _template_size(hyp))
                out = self._rw(inst, dont_rw_from_template(hyp), ctx, True, path)
                if not (isinstance(out, Quote) and truthy(out.value)):
                    return False
            return True
        finally:
            self._backchain -= 1
