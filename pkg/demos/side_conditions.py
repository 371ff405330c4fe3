"""Walk through the side-condition mechanism on the two shipped rule sets.

Run:  python3 demos/side_conditions.py
"""

from termrw import RewriteConfig, Rewriter, build_ruleset, format_term, parse_rule_file, parse_term
from termrw.demo import ARITH_RULES, BITAND_RULES, three_round_to_evens


def banner(s):
    print(f"\n== {s} ==")


banner("logand under an integerp context")
rs = build_ruleset(parse_rule_file(BITAND_RULES))
rw = Rewriter(rs)
ctx = [parse_term(s) for s in ("(integerp x)", "(integerp y)", "(integerp a)", "(integerp b)")]
t = parse_term("(logand (logand x y) (logand a b))")
out = rw.rewrite(t, ctx=ctx, iff=False)
print("in: ", format_term(t))
print("out:", format_term(out))
print("every bitand node carries its integerp wrapper; no re-derivation needed")

banner("halving arithmetic: d2 is only defined on evens")
rs = build_ruleset(parse_rule_file(ARITH_RULES))
rw = Rewriter(rs)
proved, final = rw.proved(three_round_to_evens())
print("with side conditions:   proved =", proved)

rw_off = Rewriter(rs, cfg=RewriteConfig(side_conditions_enabled=False))
proved_off, final_off = rw_off.proved(three_round_to_evens())
print("without side conditions: proved =", proved_off)
print("final term (stuck on d2):", format_term(final_off)[:100], "...")
