"""Executable oracles for the engine's invariants.

valid_sc checks that every rp wrapper's property actually holds under an
environment; check_preservation samples environments and compares values
before and after rewriting; check_run combines both under a context via
rejection sampling.  These stand in for mechanized proof: rules are trusted
inputs whose soundness is sampled, not proved.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .evaluator import EvalDomainError, EvalError, UnknownFunctionError, eval_term
from .rules import Syntaxp
from .terms import (
    App,
    Cons,
    LambdaApp,
    Quote,
    Var,
    beta_reduce,
    free_vars,
    rp_termp,
    truthy,
    values_equal,
)


@dataclass
class ValidityReport:
    ok: bool = True
    failures: list = field(default_factory=list)  # (path, term-or-label, env digest)
    accepted: int = 0
    skipped: int = 0
    starved: bool = False

    def fail(self, path, what, env):
        self.ok = False
        self.failures.append((path, what, env_digest(env)))

    def lines(self):
        out = [f"ok={self.ok} accepted={self.accepted} skipped={self.skipped} starved={self.starved}"]
        for path, what, digest in self.failures[:50]:
            out.append(f"  FAIL at {list(path)}: {what}  [{digest}]")
        return out


def env_digest(env):
    from .terms import format_value

    return " ".join(f"{k}={format_value(v)}" for k, v in sorted(env.items()))


# ---------------------------------------------------------------------------
# side-condition validity


def valid_sc(t, env, reg):
    """Every rp wrapper's property holds under env, following if branches
    the way evaluation would.  Evaluation errors propagate."""
    if isinstance(t, (Var, Quote)):
        return True
    if isinstance(t, LambdaApp):
        return valid_sc(beta_reduce(t), env, reg)
    if t.head == "if" and len(t.args) == 3:
        if not valid_sc(t.args[0], env, reg):
            return False
        branch = t.args[1] if truthy(eval_term(t.args[0], env, reg)) else t.args[2]
        return valid_sc(branch, env, reg)
    if t.head == "rp" and len(t.args) == 2 and isinstance(t.args[0], Quote):
        prop = App(t.args[0].value, (t.args[1],))
        if not truthy(eval_term(prop, env, reg)):
            return False
        return valid_sc(t.args[1], env, reg)
    return all(valid_sc(a, env, reg) for a in t.args)


def valid_sc_failure(t, env, reg, path=()):
    """Like valid_sc but returns the failing (path, wrapper term) or None."""
    if isinstance(t, (Var, Quote)):
        return None
    if isinstance(t, LambdaApp):
        return valid_sc_failure(beta_reduce(t), env, reg, path)
    if t.head == "if" and len(t.args) == 3:
        bad = valid_sc_failure(t.args[0], env, reg, path + (1,))
        if bad:
            return bad
        if truthy(eval_term(t.args[0], env, reg)):
            return valid_sc_failure(t.args[1], env, reg, path + (2,))
        return valid_sc_failure(t.args[2], env, reg, path + (3,))
    if t.head == "rp" and len(t.args) == 2 and isinstance(t.args[0], Quote):
        prop = App(t.args[0].value, (t.args[1],))
        if not truthy(eval_term(prop, env, reg)):
            return (path, prop)
        return valid_sc_failure(t.args[1], env, reg, path + (2,))
    for i, a in enumerate(t.args):
        bad = valid_sc_failure(a, env, reg, path + (i + 1,))
        if bad:
            return bad
    return None


# ---------------------------------------------------------------------------
# environment sampling

_SYMBOL_POOL = ("nil", "t", "foo", "bar", "k1", "key2")


def sample_value(rng):
    """Mixed distribution: half small integers, a quarter near ±2^64, a
    quarter structured (symbols and shallow pairs)."""
    roll = rng.random()
    if roll < 0.50:
        return rng.randint(-8, 8)
    if roll < 0.75:
        sign = -1 if rng.random() < 0.5 else 1
        return sign * ((1 << 64) + rng.randint(-8, 8))
    if roll < 0.875:
        return rng.choice(_SYMBOL_POOL)
    return Cons(rng.choice((0, 1, "a", "nil")), rng.choice((2, "t", "b", "nil")))


def sample_env(rng, names):
    return {name: sample_value(rng) for name in sorted(names)}


# ---------------------------------------------------------------------------
# preservation and full-run checks


def _eval_or_skip(t, env, reg):
    """(value, defined) where partial-function domain errors mean undefined."""
    try:
        return eval_term(t, env, reg), True
    except EvalDomainError:
        return None, False


def check_preservation(before, after, mode, env_samples, reg, seed=0, envs=None):
    """Sample environments; eval both terms; equal mode compares values, iff
    mode truthiness.  Samples where the input itself is undefined (a partial
    function applied off-domain) are skipped; an output undefined where the
    input was defined is a failure."""
    names = free_vars(before) | free_vars(after)
    rng = random.Random(seed)
    report = ValidityReport()
    for i in range(env_samples):
        env = envs[i] if envs is not None else sample_env(rng, names)
        v_before, ok_before = _eval_or_skip(before, env, reg)
        if not ok_before:
            report.skipped += 1
            continue
        v_after, ok_after = _eval_or_skip(after, env, reg)
        if not ok_after:
            report.fail((), "rewritten term undefined where input is defined", env)
            continue
        report.accepted += 1
        if mode == "equal":
            if not values_equal(v_before, v_after):
                report.fail((), "value changed by rewriting", env)
        else:
            if truthy(v_before) != truthy(v_after):
                report.fail((), "truthiness changed by rewriting", env)
    return report


REJECTION_CAP = 100


def check_run(before, after, ctx, env_samples, reg, mode="iff", seed=0):
    """Rejection-sample envs satisfying every ctx fact; per accepted env,
    assert valid_sc(after) and preservation.  Starvation (cannot find
    satisfying envs within 100x the requested count) is reported separately
    from failures."""
    names = free_vars(before) | free_vars(after)
    for f in ctx:
        names |= free_vars(f)
    rng = random.Random(seed)
    report = ValidityReport()
    tries = 0
    cap = env_samples * REJECTION_CAP
    while report.accepted + report.skipped < env_samples and tries < cap:
        tries += 1
        env = sample_env(rng, names)
        try:
            if not all(truthy(eval_term(f, env, reg)) for f in ctx):
                continue
        except EvalError:
            continue
        v_before, ok_before = _eval_or_skip(before, env, reg)
        if not ok_before:
            report.skipped += 1
            continue
        try:
            v_after = eval_term(after, env, reg)
        except EvalDomainError:
            report.fail((), "rewritten term undefined where input is defined", env)
            continue
        if mode == "equal":
            if not values_equal(v_before, v_after):
                report.fail((), "value changed by rewriting", env)
        elif truthy(v_before) != truthy(v_after):
            report.fail((), "truthiness changed by rewriting", env)
        try:
            bad = valid_sc_failure(after, env, reg)
        except EvalError as exc:
            report.fail((), f"side-condition evaluation error: {exc}", env)
            continue
        if bad is not None:
            report.fail(bad[0], bad[1], env)
            continue
        report.accepted += 1
    if report.accepted + report.skipped < env_samples:
        report.starved = True
    return report


def check_syntax_preserved(before, after):
    """rp_termp must survive rewriting."""
    return (not rp_termp(before)) and (not rp_termp(after))


# ---------------------------------------------------------------------------
# rule soundness sampling (strict-mode ingestion check)


def sample_rule_soundness(rule, reg, env_samples=1000, seed=0):
    """For envs satisfying the hyps (rejection sampling), lhs and rhs must
    agree per the rule's equivalence.  Syntaxp hyps restrict applicability,
    not truth, so they are ignored here.  Rules mentioning unregistered
    functions are reported as skipped, not failed."""
    hyps = [h for h in rule.hyps if not isinstance(h, Syntaxp)]
    names = free_vars(rule.lhs) | free_vars(rule.rhs)
    for h in hyps:
        names |= free_vars(h)
    rng = random.Random(seed)
    report = ValidityReport()
    tries = 0
    cap = env_samples * REJECTION_CAP
    while report.accepted + report.skipped < env_samples and tries < cap:
        tries += 1
        env = sample_env(rng, names)
        try:
            if not all(truthy(eval_term(h, env, reg)) for h in hyps):
                continue
        except UnknownFunctionError:
            report.skipped = env_samples
            break
        except EvalDomainError:
            continue
        try:
            v_lhs, ok_lhs = _eval_or_skip(rule.lhs, env, reg)
            if not ok_lhs:
                report.skipped += 1
                continue
            v_rhs = eval_term(rule.rhs, env, reg)
        except UnknownFunctionError:
            report.skipped = env_samples
            break
        except EvalDomainError:
            report.fail((), f"rule {rule.name}: rhs undefined where lhs is defined", env)
            continue
        report.accepted += 1
        if rule.equiv == "equal":
            if not values_equal(v_lhs, v_rhs):
                report.fail((), f"rule {rule.name}: lhs and rhs differ", env)
        elif truthy(v_lhs) != truthy(v_rhs):
            report.fail((), f"rule {rule.name}: lhs and rhs differ in truthiness", env)
    if report.accepted == 0 and not report.failures and report.skipped < env_samples:
        report.starved = True
    return report


# ---------------------------------------------------------------------------
# random conjecture generation for the invariant suite

_GEN_UNARY = ("unary--", "evenp", "integerp", "not", "consp", "atom", "f2", "neg-m2", "round-to-even")
_GEN_BINARY = ("binary-+", "binary-logand", "4vec-bitand", "floor", "mod", "equal", "cons", "lexorder")


def random_term(rng, depth, var_names=("a", "b", "c")):
    """A random term over registered heads only, so evaluation is total
    modulo partial-function domains."""
    if depth <= 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.5:
            return Var(rng.choice(var_names))
        if roll < 0.85:
            return Quote(rng.randint(-6, 6))
        return Quote(rng.choice(("t", "nil", "foo")))
    roll = rng.random()
    if roll < 0.15:
        return App(
            "if",
            (
                random_term(rng, depth - 1, var_names),
                random_term(rng, depth - 1, var_names),
                random_term(rng, depth - 1, var_names),
            ),
        )
    if roll < 0.5:
        return App(rng.choice(_GEN_UNARY), (random_term(rng, depth - 1, var_names),))
    return App(
        rng.choice(_GEN_BINARY),
        (random_term(rng, depth - 1, var_names), random_term(rng, depth - 1, var_names)),
    )


def random_conjecture(rng, depth=4):
    return random_term(rng, depth)
