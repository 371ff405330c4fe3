"""Rule ingestion: parsing rule files, validity checks, side-condition
attachment, and lambda elimination.

A rewrite rule is (implies hyps (equal lhs rhs)); a side-condition lemma is
(implies hyps (prop subject)) with prop unary.  Attaching the lemma to a
rule wraps every rhs occurrence of subject as (rp 'prop subject), which the
rewriter later extracts instead of re-proving.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .terms import (
    NIL,
    T,
    NIL_TERM,
    T_TERM,
    SPECIAL_HEADS,
    App,
    LambdaApp,
    ParseError,
    Quote,
    Term,
    Var,
    beta_reduce,
    contains_head,
    free_vars,
    list_items,
    mk_rp,
    read_values,
    rp_termp,
    strip_rp_deep,
    term_from_value,
    terms_equal,
    vars_in_order,
)


class RuleFileError(ValueError):
    pass


@dataclass(frozen=True)
class Syntaxp:
    """A hyp relieved by inspecting the bound terms themselves, not their
    values; the predicate comes from a small interpreted set."""

    pred: Term

    def __repr__(self):
        return f"(syntaxp {self.pred!r})"


@dataclass(frozen=True)
class Rule:
    name: str
    hyps: tuple  # Term or Syntaxp conjuncts
    lhs: Term
    rhs: Term
    equiv: str  # "equal" | "iff"
    sc_wrapped_rhs: Term = None
    enabled: bool = True
    internal: bool = False  # engine-shipped, exempt from user-rule checks
    group: str = None  # source declaration; conjunct-splits share one

    def __post_init__(self):
        if self.sc_wrapped_rhs is None:
            object.__setattr__(self, "sc_wrapped_rhs", self.rhs)
        if self.group is None:
            object.__setattr__(self, "group", self.name)

    @property
    def head(self):
        return self.lhs.head if isinstance(self.lhs, App) else None


@dataclass(frozen=True)
class SideConditionLemma:
    name: str
    hyps: tuple
    prop: str
    subject: Term


@dataclass(frozen=True)
class LemmaDecl:
    """A defthmd: usable for attachment, promotable to rules by name."""

    name: str
    lemma: SideConditionLemma  # or None when the conclusion is not unary
    rules: tuple  # the rule reading, used if later promoted


@dataclass(frozen=True)
class AttachDecl:
    rule_name: str
    lemma_name: str


@dataclass(frozen=True)
class DisableExecDecl:
    fn: str


@dataclass(frozen=True)
class EnableRuleDecl:
    rule_name: str
    enabled: bool


@dataclass(frozen=True)
class RuleSet:
    rules: dict = field(default_factory=dict)  # name -> Rule, insertion order
    buckets: dict = field(default_factory=dict)  # head -> tuple of candidates
    lemmas: dict = field(default_factory=dict)  # name -> SideConditionLemma
    exec_disabled: frozenset = frozenset()

    def candidates(self, head):
        return self.buckets.get(head, ())


# ---------------------------------------------------------------------------
# boolean-op expansion on terms (rule formulas parse with and/or/implies kept
# as applications so syntaxp predicates survive; everything else expands)


def expand_boolean_ops(t):
    if isinstance(t, (Var, Quote)):
        return t
    if isinstance(t, LambdaApp):
        return LambdaApp(t.params, expand_boolean_ops(t.body), [expand_boolean_ops(a) for a in t.args])
    args = [expand_boolean_ops(a) for a in t.args]
    if t.head == "and":
        if not args:
            return T_TERM
        out = args[-1]
        for a in reversed(args[:-1]):
            out = App("if", (a, out, NIL_TERM))
        return out
    if t.head == "or":
        if not args:
            return NIL_TERM
        out = args[-1]
        for a in reversed(args[:-1]):
            out = App("if", (a, a, out))
        return out
    if t.head == "implies" and len(args) == 2:
        return App("if", (args[0], App("if", (args[1], T_TERM, NIL_TERM)), T_TERM))
    return App(t.head, args)


def _flatten_and(t):
    if isinstance(t, App) and t.head == "and":
        out = []
        for a in t.args:
            out.extend(_flatten_and(a))
        return out
    return [t]


def _split_formula(name, formula):
    """Split a rule formula into (hyps, [(conclusion-name, lhs, rhs, equiv)]).

    hyps come from flattening the antecedent's and-structure; syntaxp
    conjuncts stay syntactic; an (and e1 e2 ...) conclusion yields one entry
    per equality, sharing the hyps.
    """
    hyps = []
    concl = formula
    while isinstance(concl, App) and concl.head == "implies" and len(concl.args) == 2:
        hyps.extend(_flatten_and(concl.args[0]))
        concl = concl.args[1]

    out_hyps = []
    for h in hyps:
        if isinstance(h, App) and h.head in ("syntaxp", "synp") and len(h.args) == 1:
            out_hyps.append(Syntaxp(h.args[0]))
        else:
            out_hyps.append(beta_reduce(expand_boolean_ops(h)))

    conclusions = []
    for i, c in enumerate(_flatten_and(concl)):
        rule_name = name if i == 0 else f"{name}_{i + 1}"
        if isinstance(c, App) and c.head in ("equal", "iff") and len(c.args) == 2:
            lhs, rhs = c.args
            equiv = c.head
        else:
            lhs, rhs, equiv = c, T_TERM, "iff"
        conclusions.append((rule_name, expand_boolean_ops(lhs), expand_boolean_ops(rhs), equiv))
    return tuple(out_hyps), conclusions


def _rules_from_formula(name, formula):
    hyps, conclusions = _split_formula(name, formula)
    return tuple(
        Rule(rule_name, hyps, beta_reduce(lhs), beta_reduce(rhs), equiv, group=name)
        for rule_name, lhs, rhs, equiv in conclusions
    )


def _lemma_from_formula(name, formula):
    hyps, conclusions = _split_formula(name, formula)
    if len(conclusions) != 1 or any(isinstance(h, Syntaxp) for h in hyps):
        return None
    _, lhs, rhs, equiv = conclusions[0]
    if not (equiv == "iff" and terms_equal(rhs, T_TERM)):
        return None
    concl = beta_reduce(lhs)
    if isinstance(concl, App) and len(concl.args) == 1 and concl.head not in SPECIAL_HEADS:
        return SideConditionLemma(name, tuple(beta_reduce(h) for h in hyps), concl.head, concl.args[0])
    return None


# ---------------------------------------------------------------------------
# rule file parsing


def _as_name(v, form):
    if not isinstance(v, str) or v in (NIL, T):
        raise RuleFileError(f"{form} expects a symbol name, got {v!r}")
    return v


def parse_rule_file(text):
    """Parse declarations in file order.

    Forms: (def-rp-rule name formula), (defthm name formula) same thing,
    (defthmd name formula) lemma-only, (add-rp-rule name [formula]) promotes
    an earlier defthmd or acts as def-rp-rule, (defthm-lambda name formula),
    (rp-attach-sc rule lemma), (disable-exec fn), (enable-rule name bool).
    """
    decls = []
    parked = {}  # defthmd name -> LemmaDecl
    for form in read_values(text):
        items = list_items(form)
        if not items or not isinstance(items[0], str):
            raise RuleFileError(f"not a declaration: {form!r}")
        op, rest = items[0], items[1:]
        if op in ("def-rp-rule", "defthm"):
            if len(rest) != 2:
                raise RuleFileError(f"{op} expects a name and a formula")
            name = _as_name(rest[0], op)
            decls.extend(_rules_from_formula(name, term_from_value(rest[1], keep_boolean_ops=True)))
        elif op == "defthmd":
            if len(rest) != 2:
                raise RuleFileError("defthmd expects a name and a formula")
            name = _as_name(rest[0], op)
            formula = term_from_value(rest[1], keep_boolean_ops=True)
            decl = LemmaDecl(name, _lemma_from_formula(name, formula), _rules_from_formula(name, formula))
            parked[name] = decl
            decls.append(decl)
        elif op == "add-rp-rule":
            if len(rest) == 1:
                name = _as_name(rest[0], op)
                if name not in parked:
                    raise RuleFileError(f"add-rp-rule: no earlier defthmd named {name}")
                decls.extend(parked[name].rules)
            elif len(rest) == 2:
                name = _as_name(rest[0], op)
                decls.extend(_rules_from_formula(name, term_from_value(rest[1], keep_boolean_ops=True)))
            else:
                raise RuleFileError("add-rp-rule expects a name and optionally a formula")
        elif op == "defthm-lambda":
            if len(rest) != 2:
                raise RuleFileError("defthm-lambda expects a name and a formula")
            name = _as_name(rest[0], op)
            rules, _ = defthm_lambda(name, term_from_value(rest[1], keep_boolean_ops=True))
            decls.extend(rules)
        elif op == "rp-attach-sc":
            if len(rest) != 2:
                raise RuleFileError("rp-attach-sc expects a rule name and a lemma name")
            decls.append(AttachDecl(_as_name(rest[0], op), _as_name(rest[1], op)))
        elif op == "disable-exec":
            if len(rest) != 1:
                raise RuleFileError("disable-exec expects a function name")
            decls.append(DisableExecDecl(_as_name(rest[0], op)))
        elif op == "enable-rule":
            if len(rest) != 2 or rest[1] not in (T, NIL):
                raise RuleFileError("enable-rule expects a rule name and t/nil")
            decls.append(EnableRuleDecl(_as_name(rest[0], op), rest[1] == T))
        else:
            raise RuleFileError(f"unknown declaration {op}; rule classes other than rewrite rules are not supported")
    return decls


# ---------------------------------------------------------------------------
# validation


_SYNTAXP_PREDS = frozenset({"lexorder", "atom", "consp", "equal", "not", "and", "or", "quotep", "car"})


def _check_syntaxp_pred(t, problems):
    if isinstance(t, (Var, Quote)):
        return
    if not isinstance(t, App) or t.head not in _SYNTAXP_PREDS:
        problems.append(f"syntaxp predicate outside the supported set: {t!r}")
        return
    for a in t.args:
        _check_syntaxp_pred(a, problems)


def validate_rule(rule):
    """The ingestion criteria; returns a list of violation messages."""
    problems = []
    lhs, rhs = rule.lhs, rule.rhs
    if not isinstance(lhs, App):
        problems.append("lhs must be a function application")
        return problems
    if lhs.head in SPECIAL_HEADS:
        problems.append(f"lhs head {lhs.head} is reserved")
    if contains_head(lhs, "if"):
        problems.append("lhs cannot contain if")
    ordinary_hyps = [h for h in rule.hyps if not isinstance(h, Syntaxp)]
    for t, what in [(lhs, "lhs"), (rhs, "rhs")] + [(h, "hyp") for h in ordinary_hyps]:
        if contains_head(t, "rp") or contains_head(t, "falist"):
            problems.append(f"{what} cannot contain rp or falist")
        for _path, msg in rp_termp(t):
            problems.append(f"{what}: {msg}")
    lhs_vars = free_vars(lhs)
    loose = (free_vars(rhs) | set().union(*[free_vars(h) for h in ordinary_hyps] or [set()])) - lhs_vars
    for h in rule.hyps:
        if isinstance(h, Syntaxp):
            loose |= free_vars(h.pred) - lhs_vars
            _check_syntaxp_pred(h.pred, problems)
    if loose:
        problems.append(f"free variables not bound by lhs: {', '.join(sorted(loose))}")
    return problems


# ---------------------------------------------------------------------------
# side-condition attachment


class AttachError(ValueError):
    pass


def attach_sc(rule, lemma):
    """Merge lemma into rule: wrap rhs occurrences of lemma.subject."""
    rule_hyps = [beta_reduce(h) for h in rule.hyps if not isinstance(h, Syntaxp)]
    for h in lemma.hyps:
        hr = beta_reduce(h)
        if not any(terms_equal(hr, rh) for rh in rule_hyps):
            raise AttachError(f"lemma {lemma.name} hypothesis {hr!r} is not among the hypotheses of {rule.name}")
    subject = lemma.subject
    found = False

    def wrap(t):
        nonlocal found
        if isinstance(t, (Var, Quote)):
            if terms_equal(t, subject):
                found = True
                return mk_rp(lemma.prop, t)
            return t
        if terms_equal(strip_rp_deep(t), subject):
            found = True
            return mk_rp(lemma.prop, t)
        if isinstance(t, App):
            return App(t.head, [wrap(a) for a in t.args])
        return t

    wrapped = wrap(rule.sc_wrapped_rhs)
    if not found:
        raise AttachError(f"lemma {lemma.name} subject does not occur in the rhs of {rule.name}")
    return replace(rule, sc_wrapped_rhs=wrapped)


# ---------------------------------------------------------------------------
# lambda elimination


class LambdaSplitError(ValueError):
    pass


def defthm_lambda(name, formula):
    """Split a rule whose rhs is a let/let* chain into lambda-free rules.

    Generates one function symbol per lambda layer, named
    <name>_lambda-fnc_<k> with the innermost layer getting the highest k,
    opener rules (innermost first, grouped under <name>_lambda-opener), and
    the main rule calling the outermost generated function.  Returns
    (rules, generated function names).
    """
    hyps, conclusions = _split_formula(name, formula)
    if len(conclusions) != 1:
        raise LambdaSplitError("defthm-lambda expects a single equality conclusion")
    _, lhs, rhs, equiv = conclusions[0]
    lhs = beta_reduce(lhs)

    chain = []
    node = rhs
    seen_params = set()
    while isinstance(node, LambdaApp):
        overlap = seen_params.intersection(node.params)
        if overlap:
            raise LambdaSplitError(f"variable shadowing across let layers: {', '.join(sorted(overlap))}")
        seen_params.update(node.params)
        chain.append(node)
        node = node.body
    for lam in chain:
        if any(isinstance(a, LambdaApp) for a in lam.args):
            raise LambdaSplitError("lambda in argument position is not supported")

    if not chain:
        return tuple(Rule(rn, hyps, l, beta_reduce(r), e) for rn, l, r, e in conclusions), ()

    count = len(chain)
    fnc_names = [f"{name}_lambda-fnc_{j}" for j in range(count)]
    openers = []  # innermost first
    call = None
    for j in range(count - 1, -1, -1):
        lam = chain[j]
        body = node if j == count - 1 else call
        own = list(lam.params)
        extras = [v for v in vars_in_order(body) if v not in own]
        params = own + extras
        opener_lhs = App(fnc_names[j], tuple(Var(p) for p in params))
        openers.append((opener_lhs, body))
        call = App(fnc_names[j], tuple(lam.args) + tuple(Var(v) for v in extras))

    rules = []
    for i, (olhs, orhs) in enumerate(openers):
        rn = f"{name}_lambda-opener" if i == 0 else f"{name}_lambda-opener_{i + 1}"
        rules.append(Rule(rn, (), olhs, orhs, "equal", group=f"{name}_lambda-opener"))
    rules.append(Rule(name, hyps, lhs, call, equiv))
    return tuple(rules), tuple(fnc_names)


# ---------------------------------------------------------------------------
# ruleset construction


def base_rules():
    """Engine-shipped rules, tried after all user rules."""
    x = Var("x")
    return (
        Rule("hide-elim", (), App("hide", (x,)), x, "equal", internal=True),
        Rule("equal-self", (), App("equal", (x, x)), T_TERM, "equal", internal=True),
    )


def build_ruleset(decls, include_base=True):
    """Index declarations into a RuleSet.

    Within a head bucket, later declarations are tried first; conjuncts of
    one declaration keep their source order relative to each other.
    """
    ordered = list(base_rules()) if include_base else []
    lemmas = {}
    names = {}
    exec_disabled = set()
    for d in decls:
        if isinstance(d, Rule):
            if d.name in names:
                raise RuleFileError(f"duplicate rule name {d.name}")
            names[d.name] = len(ordered)
            ordered.append(d)
        elif isinstance(d, LemmaDecl):
            if d.lemma is not None:
                lemmas[d.name] = d.lemma
        elif isinstance(d, AttachDecl):
            if d.rule_name not in names:
                raise RuleFileError(f"rp-attach-sc: unknown rule {d.rule_name}")
            if d.lemma_name not in lemmas:
                raise RuleFileError(f"rp-attach-sc: unknown lemma {d.lemma_name}")
            i = names[d.rule_name]
            ordered[i] = attach_sc(ordered[i], lemmas[d.lemma_name])
        elif isinstance(d, EnableRuleDecl):
            if d.rule_name not in names:
                raise RuleFileError(f"enable-rule: unknown rule {d.rule_name}")
            i = names[d.rule_name]
            ordered[i] = replace(ordered[i], enabled=d.enabled)
        elif isinstance(d, DisableExecDecl):
            exec_disabled.add(d.fn)
        else:
            raise RuleFileError(f"unknown declaration object {d!r}")

    # group consecutive conjunct-splits of one declaration so reversal keeps
    # their internal order
    groups = []
    for rule in ordered:
        if groups and rule.group == groups[-1][0].group:
            groups[-1].append(rule)
        else:
            groups.append([rule])

    rules = {r.name: r for r in ordered}
    buckets = {}
    for group in reversed(groups):
        for rule in group:
            if isinstance(rule.lhs, App):
                buckets.setdefault(rule.lhs.head, []).append(rule)
    return RuleSet(
        rules=rules,
        buckets={h: tuple(b) for h, b in buckets.items()},
        lemmas=lemmas,
        exec_disabled=frozenset(exec_disabled),
    )
