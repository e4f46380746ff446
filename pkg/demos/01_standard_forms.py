"""Parsing group descriptions and working with their standard forms.

Every group here is described symbolically: a direct sum of cyclic groups,
Prüfer groups, copies of the rationals, p-adic completions, and infinite
families of those indexed by primes.  Parsing always normalizes — composite
moduli split by CRT, finite families expand, duplicate summands merge — so
two descriptions of the same standard form compare equal structurally.
"""

from sb_abelian.groupspec import direct_sum, m_split, parse_spec, socle

texts = [
    "Z/12 + Z/12",
    "Q^aleph(1) + Prufer(2)^w",
    "sumP({2,3,5}; Z/p^2)",          # finite family: expands to singletons
    "sumP(all\\{2}; Z/p^1) + Z/5",   # infinite family: stays symbolic
    "Zhat(3)^w",
    "0",                             # the trivial group
]

print("normalization")
print("-------------")
for text in texts:
    print(f"  {text:35} ->  {parse_spec(text)}")

a = parse_spec("Z/4 + Z/9")
b = parse_spec("Z/4^w + Prufer(3)")
print("\ndirect sums merge multiplicities:")
print(f"  ({a}) + ({b}) = {direct_sum(a, b)}")

g = parse_spec("sumP(all; Z/p^1) + Z/8^w + Q")
print(f"\nsocle of {g}:")
print(f"  {socle(g)}")

# splitting off the part annihilated by a modulus
h = parse_spec("Z/2 + Z/4^w + sumP(all\\{2}; Z/p^1)")
split = m_split(h, 4)
print(f"\nsplitting {h} at modulus 4:")
print(f"  4-torsion part: {split.torsion}")
print(f"  complement:     {split.complement}")
