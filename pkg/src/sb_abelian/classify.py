"""Classification of spec theories: stability, the Schroeder-Bernstein
property, and automorphism structure of the connected quotient.

For a complete theory of abelian groups the following are equivalent, and
this module decides each one separately so the agreement itself is testable:

1. any two bi-embeddable models are isomorphic (the theory "has SB");
2. the theory is omega-stable;
3. every model is a direct sum of a divisible group and a torsion group of
   bounded exponent;
4. the theory is superstable and, modulo the intersection of the
   finite-index definable subgroups, every automorphism is unipotent.

On specs, omega-stability means: only cyclic singletons, quasicyclic and
rational summands (condition 3 verbatim).  Superstability fails exactly when
one prime carries cyclic summands of unboundedly many exponents, or
infinitely many primes carry a reduced summand with infinite multiplicity.
When the SB property fails, a witness route records which construction
produces a bi-embeddable non-isomorphic pair.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .groupspec import (
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
    normalize,
)
from .invariants import szmielew_invariants

__all__ = [
    "StabilityClass",
    "WitnessRoute",
    "SbVerdict",
    "BasicPredicates",
    "Continuum",
    "CONTINUUM",
    "NonUnipotentWitness",
    "UnipotenceReport",
    "NotApplicableError",
    "basic_predicates",
    "stability_class",
    "divisible_plus_bounded",
    "has_sb",
    "connected_component_index",
    "unipotence_report",
]


class StabilityClass(enum.Enum):
    OMEGA_STABLE = "omega_stable"
    SUPERSTABLE_NOT_OMEGA_STABLE = "superstable_not_omega_stable"
    NOT_SUPERSTABLE = "not_superstable"


class WitnessRoute(enum.Enum):
    EXTERNAL_NON_SUPERSTABLE = "ExternalNonSuperstable"
    PADIC_WITNESS = "PAdicWitness"
    SOCLE_WITNESS = "SocleWitness"


class NotApplicableError(ValueError):
    """The requested report is undefined for this stability class."""


@dataclass(frozen=True)
class BasicPredicates:
    divisible: bool
    reduced: bool
    exponent: int | None  # None when unbounded

    @property
    def bounded(self) -> bool:
        return self.exponent is not None


def basic_predicates(spec: GroupSpec) -> BasicPredicates:
    """Divisibility, reducedness and boundedness read off the entry list.

    A spec is divisible iff every summand is quasicyclic or rational, and
    reduced iff no summand is.  (The trivial group is both.)
    """
    divisible = all(isinstance(fam, (Prufer, Rationals)) for fam, _ in spec.entries)
    reduced = not any(isinstance(fam, (Prufer, Rationals)) for fam, _ in spec.entries)
    inv = szmielew_invariants(spec)
    return BasicPredicates(divisible=divisible, reduced=reduced, exponent=inv.exponent)


def stability_class(spec: GroupSpec) -> StabilityClass:
    """Place the theory of the spec in the stability hierarchy.

    Not superstable: a single prime with unboundedly many cyclic exponents
    (an exponent family over all k), or a reduced summand of infinite
    multiplicity spread over infinitely many primes.  Omega-stable: divisible
    plus bounded torsion.  Everything else sits strictly between.
    """
    for fam, mult in spec.entries:
        if isinstance(fam, CyclicExponentFamily) and fam.exponents is None:
            return StabilityClass.NOT_SUPERSTABLE
        if (
            isinstance(fam, (CyclicPrimeFamily, PAdicPrimeFamily))
            and not fam.primes.is_finite
            and not mult.is_finite
        ):
            return StabilityClass.NOT_SUPERSTABLE
    if all(isinstance(fam, (Cyclic, Prufer, Rationals)) for fam, _ in spec.entries):
        return StabilityClass.OMEGA_STABLE
    return StabilityClass.SUPERSTABLE_NOT_OMEGA_STABLE


def divisible_plus_bounded(spec: GroupSpec) -> bool:
    """Is every model a divisible group plus torsion of bounded exponent?

    Coded directly off the entry constructors, independent of
    :func:`stability_class`: the divisible summands are quasicyclic/rational
    and the torsion ones must be finitely many cyclic singletons.
    """
    for fam, _ in spec.entries:
        if isinstance(fam, (Prufer, Rationals)):
            continue
        if isinstance(fam, Cyclic):
            continue
        return False
    return True


@dataclass(frozen=True)
class SbVerdict:
    has_sb: bool
    route: WitnessRoute | None
    reason: str

    def to_json(self) -> dict:
        return {
            "has_sb": self.has_sb,
            "route": self.route.value if self.route else None,
            "reason": self.reason,
        }


def has_sb(spec: GroupSpec) -> SbVerdict:
    """Decide the Schroeder-Bernstein property and pick a witness route.

    The decision path runs through the invariant table (unboundedness of the
    reduced part), not the stability case analysis, so that agreement of the
    two is a real check.
    """
    reduced_entries = [
        (fam, mult)
        for fam, mult in spec.entries
        if not isinstance(fam, (Prufer, Rationals))
    ]
    reduced_part = normalize(reduced_entries)
    if szmielew_invariants(reduced_part).bounded:
        return SbVerdict(
            has_sb=True,
            route=None,
            reason="every model is divisible plus torsion of bounded exponent; "
            "bi-embeddable models share all cardinal invariants",
        )
    if stability_class(spec) is StabilityClass.NOT_SUPERSTABLE:
        return SbVerdict(
            has_sb=False,
            route=WitnessRoute.EXTERNAL_NON_SUPERSTABLE,
            reason="the theory is not superstable; witness pairs exist for every "
            "non-superstable theory of abelian groups but are not constructed here",
        )
    if any(isinstance(fam, (PAdicComplete, PAdicPrimeFamily)) for fam, _ in spec.entries):
        return SbVerdict(
            has_sb=False,
            route=WitnessRoute.PADIC_WITNESS,
            reason="a p-adic completion summand admits bi-embeddable non-isomorphic "
            "pure subgroup envelopes built from independent scaling units",
        )
    return SbVerdict(
        has_sb=False,
        route=WitnessRoute.SOCLE_WITNESS,
        reason="unbounded reduced torsion over infinitely many primes reduces to a "
        "socle witness pair built from coordinate scalar automorphisms",
    )


class Continuum:
    """Index value 2**aleph_0 (the connected quotient is not small)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Continuum()"

    def __str__(self) -> str:
        return "2^aleph(0)"


CONTINUUM = Continuum()


def connected_component_index(spec: GroupSpec) -> int | Continuum:
    """Index of the intersection of the finite-index definable subgroups.

    For divisible-plus-bounded specs the intersection is reached by
    multiplying out the finite-multiplicity cyclic summands, giving index
    prod p**(k*m); any other shape forces index continuum.

    >>> from sb_abelian.groupspec import parse_spec
    >>> connected_component_index(parse_spec("Z/2^3 + Q"))
    8
    >>> connected_component_index(parse_spec("Q^5"))
    1
    >>> connected_component_index(parse_spec("Zhat(5)"))
    Continuum()
    """
    if not divisible_plus_bounded(spec):
        return CONTINUUM
    index = 1
    for fam, mult in spec.entries:
        if isinstance(fam, Cyclic) and mult.is_finite:
            # only n coprime to the infinite-multiplicity primes keep nG of
            # finite index, so exactly the finite-multiplicity summands die
            index *= fam.p ** (fam.k * mult.value)
    return index


@dataclass(frozen=True)
class NonUnipotentWitness:
    """Description of an automorphism of infinite order modulo unipotents."""

    kind: str  # "padic_scalar" | "family_coordinate_scalars"
    p: int | None
    primes: PrimeSet | None
    note: str

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "p": self.p,
            "primes": self.primes.to_json() if self.primes else None,
            "note": self.note,
        }


@dataclass(frozen=True)
class UnipotenceReport:
    index: "int | Continuum"
    unipotent_all: bool
    witness: NonUnipotentWitness | None

    def to_json(self) -> dict:
        return {
            "index": self.index if isinstance(self.index, int) else str(self.index),
            "unipotent_all": self.unipotent_all,
            "witness": self.witness.to_json() if self.witness else None,
        }


def unipotence_report(spec: GroupSpec) -> UnipotenceReport:
    """Are all automorphisms of the connected quotient unipotent?

    Raises :class:`NotApplicableError` on non-superstable specs (the quotient
    analysis presupposes superstability).  When the answer is no, a witness
    is produced: scalar action by a non-algebraic unit on a p-adic completion
    summand, or coordinatewise scalars of order p-1 across an infinite cyclic
    prime family (whose orders are unbounded along the family).
    """
    stability = stability_class(spec)
    if stability is StabilityClass.NOT_SUPERSTABLE:
        raise NotApplicableError("unipotence analysis requires a superstable theory")
    index = connected_component_index(spec)
    if stability is StabilityClass.OMEGA_STABLE:
        return UnipotenceReport(index=index, unipotent_all=True, witness=None)
    for fam, _ in spec.entries:
        if isinstance(fam, PAdicComplete):
            witness = NonUnipotentWitness(
                kind="padic_scalar",
                p=fam.p,
                primes=None,
                note=f"multiplication by a non-algebraic {fam.p}-adic unit on the "
                "completion summand has infinite multiplicative order",
            )
            break
        if isinstance(fam, PAdicPrimeFamily):
            witness = NonUnipotentWitness(
                kind="padic_scalar",
                p=min(fam.primes.first_n(1)),
                primes=fam.primes,
                note="multiplication by a non-algebraic unit on any completion "
                "component of the family has infinite multiplicative order",
            )
            break
        if isinstance(fam, CyclicPrimeFamily):
            witness = NonUnipotentWitness(
                kind="family_coordinate_scalars",
                p=None,
                primes=fam.primes,
                note="choosing a scalar of multiplicative order p-1 on each "
                "component yields an automorphism of unbounded order",
            )
            break
    else:  # pragma: no cover - unreachable: some non-(*) entry must exist
        raise AssertionError("superstable-not-omega-stable spec without witness entry")
    return UnipotenceReport(index=index, unipotent_all=False, witness=witness)
