"""When do two descriptions satisfy the same first-order sentences?

Elementary equivalence of abelian groups is decided by a finite fingerprint:
dimension invariants per prime (capped at the first infinite cardinal), plus
a boundedness flag.  Isomorphism of the standard forms is finer — the caps
throw away exactly the information that first-order logic cannot see.
"""

import json

from sb_abelian.groupspec import parse_spec
from sb_abelian.invariants import (
    elementarily_equivalent,
    isomorphic_standard,
    szmielew_invariants,
)

pairs = [
    # the caps at work: one copy of Q is elementarily equivalent to many
    ("Q", "Q^w"),
    ("Prufer(2)^w", "Prufer(2)^aleph(1)"),
    # torsion at different primes is visible
    ("Z/4", "Z/2 + Z/2"),
    # completions are invisible to the torsion invariants but not to the
    # torsion-free ones
    ("Zhat(5)", "Zhat(5) + Q"),
    # finite multiplicities absorb into infinite ones during normalization
    ("Z/4^w + Z/4", "Z/4^w"),
    # isomorphism here means identical normal forms; a family entry and a
    # singleton that patches its excluded prime are listed differently, so
    # the comparison is finer than equivalence at family boundaries
    ("sumP(all; Z/p^1)", "sumP(all\\{2}; Z/p^1) + Z/2"),
]

width = max(len(a) + len(b) for a, b in pairs) + 6
for left, right in pairs:
    eq = elementarily_equivalent(parse_spec(left), parse_spec(right))
    iso = isomorphic_standard(parse_spec(left), parse_spec(right))
    label = f"{left}  vs  {right}"
    print(f"{label:{width}}  equivalent={eq!s:5}  isomorphic={iso}")

print("\nfull invariant table for Zhat(2) + Prufer(3)^w + Z/4^5:")
table = szmielew_invariants(parse_spec("Zhat(2) + Prufer(3)^w + Z/4^5"))
print(json.dumps(table.to_json(), indent=2, sort_keys=True))
