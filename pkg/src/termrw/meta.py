"""Meta rules: native term transformers attached to a trigger head.

A meta function takes the term and returns either a new term, a (term,
dont-rw) pair, or None for "no change".  Unless registered as trusted, its
output must pass the well-formedness check or the result is discarded.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import App, Quote, Term, is_rp, node_count, rp_termp, strip_rp

RESERVED_TRIGGERS = frozenset({"rp", "falist", "quote"})


class MetaRegistrationError(ValueError):
    pass


@dataclass(frozen=True)
class MetaRule:
    name: str
    trigger: str
    fn: object  # Term -> Term | (Term, DontRw) | None
    trusted_syntax: bool = False


class MetaRegistry:
    """Triggers map to meta rules; later registrations are tried first."""

    def __init__(self, metas=()):
        self._by_trigger = {}
        self._names = set()
        for m in metas:
            self.register(m)

    def register(self, meta):
        if meta.trigger in RESERVED_TRIGGERS:
            raise MetaRegistrationError(f"cannot register a meta rule on reserved head {meta.trigger}")
        if meta.name in self._names:
            raise MetaRegistrationError(f"duplicate meta rule name {meta.name}")
        self._names.add(meta.name)
        self._by_trigger.setdefault(meta.trigger, []).insert(0, meta)
        return self

    def __len__(self):
        return len(self._names)

    def candidates(self, head):
        return self._by_trigger.get(head, ())

    def apply(self, t, stats, diagnostics=None):
        """First meta that changes t wins.  Matching is wrapper-transparent:
        triggers fire on the stripped head, receiving the stripped term.
        Returns (new term, dont-rw or None) or None."""
        core = strip_rp(t)
        if not isinstance(core, App):
            return None
        for meta in self._by_trigger.get(core.head, ()):
            out = meta.fn(core)
            if out is None:
                continue
            if isinstance(out, tuple):
                new_t, dont_rw = out
            else:
                new_t, dont_rw = out, None
            if new_t is core or new_t == core:
                continue
            if not meta.trusted_syntax:
                violations = rp_termp(new_t)
                if violations:
                    stats.meta_rejections += 1
                    if diagnostics is not None:
                        diagnostics.append((meta.name, violations))
                    continue
            stats.meta_applications += 1
            stats.nodes_created += node_count(new_t)
            return new_t, dont_rw
        return None


# ---------------------------------------------------------------------------
# shipped demo metas: constant folding over binary-+ spines


def _fold_plus_core(t):
    """Collect quoted-integer addends in a binary-+ spine; fold them into one
    leading constant.  Returns the folded term or None."""
    total = 0
    nconst = 0
    rest = []

    def walk(u):
        nonlocal total, nconst
        u = strip_rp(u)
        if isinstance(u, App) and u.head == "binary-+" and len(u.args) == 2:
            walk(u.args[0])
            walk(u.args[1])
        elif isinstance(u, Quote) and isinstance(u.value, int):
            total += u.value
            nconst += 1
        else:
            rest.append(u)

    walk(t)
    if nconst < 2:
        return None
    if not rest:
        return Quote(total)
    out = rest[-1]
    for r in reversed(rest[:-1]):
        out = App("binary-+", (r, out))
    return App("binary-+", (Quote(total), out))


def fold_plus(t):
    """Demo meta: fold constants, stopping all further rewriting below."""
    folded = _fold_plus_core(t)
    if folded is None:
        return None
    from .rewriter import STOP

    return folded, STOP


def fold_plus_hide(t):
    """Same folding, but protects the result with hide instead of dont-rw."""
    folded = _fold_plus_core(t)
    if folded is None:
        return None
    return App("hide", (folded,))


def demo_metas():
    return (
        MetaRule("fold-plus", "binary-+", fold_plus),
        MetaRule("fold-plus-hide", "binary-+", fold_plus_hide),
    )
