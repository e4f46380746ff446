"""Decision procedures for complete theories of abelian groups.

The package classifies direct sums of the standard pure-injective building
blocks (finite cyclic groups, quasicyclic groups, the rationals, p-adic
completions, and their prime- and exponent-indexed families): it decides
elementary equivalence and isomorphism of standard forms, the stability
hierarchy, the Schroeder-Bernstein property for the underlying first-order
theory, and constructs certificate-carrying descriptors of bi-embeddable
non-isomorphic model pairs for theories where the property fails.
"""

from .groupspec import (
    ALEPH0,
    ALL_PRIMES,
    Cardinal,
    Cyclic,
    CyclicExponentFamily,
    CyclicPrimeFamily,
    GroupSpec,
    PAdicComplete,
    PAdicPrimeFamily,
    PrimeSet,
    Prufer,
    Rationals,
    SpecSyntaxError,
    direct_sum,
    m_split,
    normalize,
    parse_spec,
    socle,
    split_reduced_divisible,
)

__all__ = [
    "ALEPH0",
    "ALL_PRIMES",
    "Cardinal",
    "Cyclic",
    "CyclicExponentFamily",
    "CyclicPrimeFamily",
    "GroupSpec",
    "PAdicComplete",
    "PAdicPrimeFamily",
    "PrimeSet",
    "Prufer",
    "Rationals",
    "SpecSyntaxError",
    "direct_sum",
    "m_split",
    "normalize",
    "parse_spec",
    "socle",
    "split_reduced_divisible",
]

__version__ = "0.1.0"
