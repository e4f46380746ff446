"""Symbolic descriptions of direct sums of the standard abelian building blocks.

A :class:`GroupSpec` is a finite formal sum of summand families, each with a
cardinal multiplicity.  The available families are the summands that occur in
the structure theory of pure-injective abelian groups:

* ``Cyclic(p, k)``            -- Z/p**k
* ``Prufer(p)``               -- the p-quasicyclic group Z(p**inf)
* ``Rationals()``             -- Q
* ``PAdicComplete(p)``        -- the additive group of the p-adic integers
* ``CyclicPrimeFamily(S, k)`` -- sum of Z/p**k over p in the prime set S
* ``PAdicPrimeFamily(S)``     -- sum of p-adic integer groups over p in S
* ``CyclicExponentFamily(p, E)`` -- sum of Z/p**k over exponents k in E

Specs are kept in a normal form: finite families are expanded into
singletons, composite cyclic moduli are split by the Chinese remainder
theorem, duplicate entries merge by cardinal addition, zero-multiplicity
entries are dropped and the entry list is canonically sorted.  Equality of
normal forms is therefore structural equality.

Expressions are parsed from a small ASCII grammar::

    spec     := term ("+" term)*
    term     := atom ["^" mult]
    atom     := "Z/" nat | "Prufer(" p ")" | "Q" | "Zhat(" p ")"
              | "sumP(" primeset ";" "Z/p^" nat ")"
              | "sumP(" primeset ";" "Zhat" ")"
              | "sumK(" p ";" expset ")"
    mult     := nat | "w" | "aleph(" nat ")"
    primeset := "{" p ("," p)* "}" | "all\\{" p ("," p)* "}" | "all"
    expset   := "all" | "{" nat ("," nat)* "}"

As an extension, the single token ``0`` denotes the trivial group (the empty
sum), which the grammar above cannot spell.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .primes import ensure_prime, factorize, first_primes_excluding, p_valuation

__all__ = [
    "Cardinal",
    "FINITE",
    "ALEPH0",
    "PrimeSet",
    "ALL_PRIMES",
    "Summand",
    "Cyclic",
    "Prufer",
    "Rationals",
    "PAdicComplete",
    "CyclicPrimeFamily",
    "PAdicPrimeFamily",
    "CyclicExponentFamily",
    "GroupSpec",
    "Entry",
    "SpecSyntaxError",
    "MSplitPreconditionError",
    "MSplitResult",
    "parse_spec",
    "normalize",
    "direct_sum",
    "socle",
    "m_split",
    "split_reduced_divisible",
    "spec_to_json",
    "spec_from_json",
]


# ---------------------------------------------------------------------------
# Cardinals
# ---------------------------------------------------------------------------


@functools.total_ordering
@dataclass(frozen=True)
class Cardinal:
    """A multiplicity: either a natural number or an aleph.

    ``Cardinal.of(3)`` is the natural number 3, ``Cardinal.aleph(i)`` the
    i-th infinite cardinal.  Addition is ordinary addition on naturals and
    maximum as soon as one operand is infinite.

    >>> Cardinal.of(2) + Cardinal.of(3)
    Cardinal.of(5)
    >>> Cardinal.aleph(0) + Cardinal.of(7)
    Cardinal.aleph(0)
    >>> Cardinal.of(5) < Cardinal.aleph(1)
    True
    """

    kind: str  # "finite" | "aleph"
    value: int

    def __post_init__(self) -> None:
        if self.kind not in ("finite", "aleph") or self.value < 0:
            raise ValueError(f"bad cardinal ({self.kind!r}, {self.value!r})")

    @classmethod
    def of(cls, n: int) -> "Cardinal":
        return cls("finite", n)

    @classmethod
    def aleph(cls, i: int) -> "Cardinal":
        return cls("aleph", i)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def _key(self) -> tuple[int, int]:
        return (0 if self.is_finite else 1, self.value)

    def __lt__(self, other: "Cardinal") -> bool:
        return self._key() < other._key()

    def __add__(self, other: "Cardinal") -> "Cardinal":
        if self.is_finite and other.is_finite:
            return Cardinal.of(self.value + other.value)
        return max(self, other)

    def cap_countable(self) -> "Cardinal":
        """Collapse every infinite value to aleph_0 (first-order blindness)."""
        return self if self.is_finite else ALEPH0

    def __str__(self) -> str:
        if self.is_finite:
            return str(self.value)
        return "w" if self.value == 0 else f"aleph({self.value})"

    def __repr__(self) -> str:
        if self.is_finite:
            return f"Cardinal.of({self.value})"
        return f"Cardinal.aleph({self.value})"

    def to_json(self) -> dict:
        return {"kind": self.kind, "value": self.value}

    @classmethod
    def from_json(cls, data: Mapping) -> "Cardinal":
        return cls(data["kind"], data["value"])


def FINITE(n: int) -> Cardinal:
    return Cardinal.of(n)


ALEPH0 = Cardinal.aleph(0)
_ZERO = Cardinal.of(0)
_ONE = Cardinal.of(1)


# ---------------------------------------------------------------------------
# Prime sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeSet:
    """A decidable set of primes: an explicit finite set or a cofinite one.

    ``PrimeSet.explicit({3, 5})`` and ``PrimeSet.cofinite({2})`` (all primes
    except 2).  Cofinite sets are always infinite; explicit ones are finite.

    >>> PrimeSet.cofinite({2}).contains(3)
    True
    >>> PrimeSet.explicit({3, 5}).contains(2)
    False
    """

    complement: bool  # True: all primes except `primes`; False: exactly `primes`
    primes: frozenset[int]

    def __post_init__(self) -> None:
        for p in self.primes:
            ensure_prime(p, "prime set member")

    @classmethod
    def explicit(cls, ps: Iterable[int]) -> "PrimeSet":
        return cls(False, frozenset(ps))

    @classmethod
    def cofinite(cls, excluded: Iterable[int] = ()) -> "PrimeSet":
        return cls(True, frozenset(excluded))

    @property
    def is_finite(self) -> bool:
        return not self.complement

    def contains(self, p: int) -> bool:
        return (p not in self.primes) if self.complement else (p in self.primes)

    def remove(self, ps: Iterable[int]) -> "PrimeSet":
        ps = frozenset(ps)
        if self.complement:
            return PrimeSet(True, self.primes | ps)
        return PrimeSet(False, self.primes - ps)

    def union(self, other: "PrimeSet") -> "PrimeSet":
        if self.complement and other.complement:
            return PrimeSet(True, self.primes & other.primes)
        if self.complement:
            return PrimeSet(True, self.primes - other.primes)
        if other.complement:
            return PrimeSet(True, other.primes - self.primes)
        return PrimeSet(False, self.primes | other.primes)

    def first_n(self, n: int) -> tuple[int, ...]:
        """The n smallest members (all members if the set is smaller)."""
        if self.complement:
            return first_primes_excluding(n, self.primes)
        return tuple(sorted(self.primes))[:n]

    def fingerprint(self) -> str:
        tag = "cofinite" if self.complement else "explicit"
        return tag + ":" + ",".join(str(p) for p in sorted(self.primes))

    def __str__(self) -> str:
        listed = ",".join(str(p) for p in sorted(self.primes))
        if self.complement:
            return "all" if not self.primes else "all\\{%s}" % listed
        return "{%s}" % listed

    def to_json(self) -> dict:
        if self.complement:
            return {"kind": "cofinite", "excluded": sorted(self.primes)}
        return {"kind": "explicit", "primes": sorted(self.primes)}

    @classmethod
    def from_json(cls, data: Mapping) -> "PrimeSet":
        if data["kind"] == "cofinite":
            return cls.cofinite(data["excluded"])
        return cls.explicit(data["primes"])


ALL_PRIMES = PrimeSet.cofinite()


# ---------------------------------------------------------------------------
# Summand families
# ---------------------------------------------------------------------------


class Summand:
    """Base class for the summand constructors; instances are immutable."""

    _rank: int = -1

    def sort_key(self) -> tuple:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Cyclic(Summand):
    """Z/p**k for a prime p and k >= 1."""

    p: int
    k: int
    _rank = 0

    def __post_init__(self) -> None:
        ensure_prime(self.p, "Cyclic prime")
        if self.k < 1:
            raise ValueError(f"Cyclic exponent must be >= 1, got {self.k}")

    @property
    def modulus(self) -> int:
        return self.p**self.k

    def sort_key(self) -> tuple:
        return (self._rank, self.p, self.k, "")

    def __str__(self) -> str:
        return f"Z/{self.modulus}"

    def to_json(self) -> dict:
        return {"kind": "cyclic", "p": self.p, "k": self.k}


@dataclass(frozen=True)
class Prufer(Summand):
    """The p-quasicyclic group: the p-power-torsion part of Q/Z."""

    p: int
    _rank = 1

    def __post_init__(self) -> None:
        ensure_prime(self.p, "Prufer prime")

    def sort_key(self) -> tuple:
        return (self._rank, self.p, 0, "")

    def __str__(self) -> str:
        return f"Prufer({self.p})"

    def to_json(self) -> dict:
        return {"kind": "prufer", "p": self.p}


@dataclass(frozen=True)
class Rationals(Summand):
    """The additive rationals."""

    _rank = 2

    def sort_key(self) -> tuple:
        return (self._rank, 0, 0, "")

    def __str__(self) -> str:
        return "Q"

    def to_json(self) -> dict:
        return {"kind": "rationals"}


@dataclass(frozen=True)
class PAdicComplete(Summand):
    """The additive group of p-adic integers (the completion of Z at p)."""

    p: int
    _rank = 3

    def __post_init__(self) -> None:
        ensure_prime(self.p, "PAdicComplete prime")

    def sort_key(self) -> tuple:
        return (self._rank, self.p, 0, "")

    def __str__(self) -> str:
        return f"Zhat({self.p})"

    def to_json(self) -> dict:
        return {"kind": "padic", "p": self.p}


@dataclass(frozen=True)
class CyclicPrimeFamily(Summand):
    """Direct sum of Z/p**k over all p in a prime set, fixed exponent k."""

    primes: PrimeSet
    k: int
    _rank = 4

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"family exponent must be >= 1, got {self.k}")

    def sort_key(self) -> tuple:
        return (self._rank, 0, self.k, self.primes.fingerprint())

    def __str__(self) -> str:
        return f"sumP({self.primes}; Z/p^{self.k})"

    def to_json(self) -> dict:
        return {"kind": "cyclic_prime_family", "primes": self.primes.to_json(), "k": self.k}


@dataclass(frozen=True)
class PAdicPrimeFamily(Summand):
    """Direct sum of the p-adic integer groups over all p in a prime set."""

    primes: PrimeSet
    _rank = 5

    def sort_key(self) -> tuple:
        return (self._rank, 0, 0, self.primes.fingerprint())

    def __str__(self) -> str:
        return f"sumP({self.primes}; Zhat)"

    def to_json(self) -> dict:
        return {"kind": "padic_prime_family", "primes": self.primes.to_json()}


@dataclass(frozen=True)
class CyclicExponentFamily(Summand):
    """Direct sum of Z/p**k over a set of exponents k at a single prime.

    ``exponents=None`` means every k >= 1 (written ``all`` in the grammar);
    a finite exponent set is expanded away during normalization.
    """

    p: int
    exponents: frozenset[int] | None
    _rank = 6

    def __post_init__(self) -> None:
        ensure_prime(self.p, "exponent family prime")
        if self.exponents is not None:
            if not self.exponents:
                raise ValueError("empty exponent set")
            if any(k < 1 for k in self.exponents):
                raise ValueError("family exponents must be >= 1")

    def sort_key(self) -> tuple:
        exps = "all" if self.exponents is None else ",".join(map(str, sorted(self.exponents)))
        return (self._rank, self.p, 0, exps)

    def __str__(self) -> str:
        if self.exponents is None:
            return f"sumK({self.p}; all)"
        listed = ",".join(str(k) for k in sorted(self.exponents))
        return f"sumK({self.p}; {{{listed}}})"

    def to_json(self) -> dict:
        exps = "all" if self.exponents is None else sorted(self.exponents)
        return {"kind": "cyclic_exponent_family", "p": self.p, "exponents": exps}


def _summand_from_json(data: Mapping) -> Summand:
    kind = data["kind"]
    if kind == "cyclic":
        return Cyclic(data["p"], data["k"])
    if kind == "prufer":
        return Prufer(data["p"])
    if kind == "rationals":
        return Rationals()
    if kind == "padic":
        return PAdicComplete(data["p"])
    if kind == "cyclic_prime_family":
        return CyclicPrimeFamily(PrimeSet.from_json(data["primes"]), data["k"])
    if kind == "padic_prime_family":
        return PAdicPrimeFamily(PrimeSet.from_json(data["primes"]))
    if kind == "cyclic_exponent_family":
        exps = data["exponents"]
        return CyclicExponentFamily(data["p"], None if exps == "all" else frozenset(exps))
    raise ValueError(f"unknown summand kind {kind!r}")


Entry = tuple[Summand, Cardinal]


# ---------------------------------------------------------------------------
# GroupSpec and normalization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupSpec:
    """A formal direct sum of summand families in normal form.

    Construct via :func:`normalize` (or :func:`parse_spec`); the raw
    constructor assumes already-normalized entries.
    """

    entries: tuple[Entry, ...]

    def __iter__(self) -> Iterator[Entry]:
        return iter(self.entries)

    @property
    def is_trivial(self) -> bool:
        return not self.entries

    def multiplicity(self, family: Summand) -> Cardinal:
        for fam, mult in self.entries:
            if fam == family:
                return mult
        return _ZERO

    def __add__(self, other: "GroupSpec") -> "GroupSpec":
        return direct_sum(self, other)

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        parts = []
        for fam, mult in self.entries:
            if mult == _ONE:
                parts.append(str(fam))
            else:
                parts.append(f"{fam}^{mult}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return spec_to_json(self)


def _expand(family: Summand, mult: Cardinal) -> Iterator[Entry]:
    """Rewrite finite families into singleton entries."""
    if isinstance(family, CyclicPrimeFamily) and family.primes.is_finite:
        for p in sorted(family.primes.primes):
            yield Cyclic(p, family.k), mult
    elif isinstance(family, PAdicPrimeFamily) and family.primes.is_finite:
        for p in sorted(family.primes.primes):
            yield PAdicComplete(p), mult
    elif isinstance(family, CyclicExponentFamily) and family.exponents is not None:
        for k in sorted(family.exponents):
            yield Cyclic(family.p, k), mult
    else:
        yield family, mult


def normalize(entries: Iterable[Entry]) -> GroupSpec:
    """Normal form of a formal sum: expand, merge, drop zeros, sort.

    >>> str(normalize([(Cyclic(2, 3), Cardinal.of(1)), (Cyclic(2, 3), Cardinal.of(2))]))
    'Z/8^3'
    >>> normalize([(Rationals(), Cardinal.of(0))]).is_trivial
    True
    """
    merged: dict[Summand, Cardinal] = {}
    for family, mult in entries:
        if not isinstance(mult, Cardinal):
            raise TypeError(f"multiplicity must be a Cardinal, got {mult!r}")
        for fam, m in _expand(family, mult):
            if fam in merged:
                merged[fam] = merged[fam] + m
            else:
                merged[fam] = m
    kept = [(fam, m) for fam, m in merged.items() if m != _ZERO]
    kept.sort(key=lambda e: e[0].sort_key())
    return GroupSpec(tuple(kept))


def direct_sum(*specs: GroupSpec) -> GroupSpec:
    """Formal direct sum; multiplicities of equal families add.

    >>> a = parse_spec("Z/2 + Q")
    >>> str(direct_sum(a, parse_spec("Z/2^w")))
    'Z/2^w + Q'
    """
    entries: list[Entry] = []
    for s in specs:
        entries.extend(s.entries)
    return normalize(entries)


def socle(spec: GroupSpec) -> GroupSpec:
    """The subgroup generated by the elements of prime order, as a spec.

    Torsion-free summands contribute nothing; Z/p**k and the p-quasicyclic
    group contribute one Z/p each; families map componentwise.

    >>> str(socle(parse_spec("Zhat(5) + Z/9 + Prufer(2)")))
    'Z/2 + Z/3'
    """
    out: list[Entry] = []
    for fam, mult in spec.entries:
        if isinstance(fam, Cyclic):
            out.append((Cyclic(fam.p, 1), mult))
        elif isinstance(fam, Prufer):
            out.append((Cyclic(fam.p, 1), mult))
        elif isinstance(fam, CyclicPrimeFamily):
            out.append((CyclicPrimeFamily(fam.primes, 1), mult))
        elif isinstance(fam, CyclicExponentFamily):
            # all exponents collapse onto k = 1; the multiplicity is unchanged
            # per copy but infinitely many exponent values pile up on one slot.
            out.append((Cyclic(fam.p, 1), mult + ALEPH0 if fam.exponents is None else mult))
        # Rationals, PAdicComplete, PAdicPrimeFamily are torsion-free: drop.
    return normalize(out)


class MSplitPreconditionError(ValueError):
    """A cyclic contribution at a prime of m is not annihilated by m."""

    def __init__(self, p: int, k: int | None, m: int):
        self.p, self.k, self.m = p, k, m
        shown = "unbounded" if k is None else f"p^{k}"
        super().__init__(
            f"m-split precondition violated: contribution {shown} at p={p} does not divide m={m}"
        )


@dataclass(frozen=True)
class MSplitResult:
    """Outcome of :func:`m_split`.

    ``torsion`` is the m-torsion part, ``complement`` the part isomorphic to
    m*G.  Quasicyclic summands land in both: their m-torsion shows up in
    ``torsion`` (flagged in ``prufer_overlap``) while the full quasicyclic
    group survives multiplication by m.  ``torsion_without_overlap`` +
    ``complement`` reassembles the input.
    """

    torsion: GroupSpec
    complement: GroupSpec
    prufer_overlap: GroupSpec
    torsion_without_overlap: GroupSpec


def m_split(spec: GroupSpec, m: int) -> MSplitResult:
    """Split off the m-torsion: G = G[m] (+) mG for specs annihilated cleanly.

    Requires every cyclic contribution at a prime p dividing m to satisfy
    p**k | m; quasicyclic and torsion-free summands are unrestricted.

    >>> r = m_split(parse_spec("Z/4 + Z/3 + Q"), 4)
    >>> str(r.torsion), str(r.complement)
    ('Z/4', 'Z/3 + Q')
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    mfact = factorize(m) if m > 1 else {}
    tors: list[Entry] = []      # m-torsion coming from reduced summands
    overlap: list[Entry] = []   # m-torsion of quasicyclic summands
    comp: list[Entry] = []
    for fam, mult in spec.entries:
        if isinstance(fam, Cyclic):
            if fam.p in mfact:
                if fam.k > mfact[fam.p]:
                    raise MSplitPreconditionError(fam.p, fam.k, m)
                tors.append((fam, mult))
            else:
                comp.append((fam, mult))
        elif isinstance(fam, CyclicExponentFamily):
            if fam.p in mfact:
                # normalized families carry unbounded exponent sets
                raise MSplitPreconditionError(fam.p, None, m)
            comp.append((fam, mult))
        elif isinstance(fam, CyclicPrimeFamily):
            inside = [p for p in mfact if fam.primes.contains(p)]
            for p in inside:
                if fam.k > mfact[p]:
                    raise MSplitPreconditionError(p, fam.k, m)
                tors.append((Cyclic(p, fam.k), mult))
            comp.append((CyclicPrimeFamily(fam.primes.remove(inside), fam.k), mult))
        elif isinstance(fam, Prufer):
            if fam.p in mfact:
                # the m-torsion of a quasicyclic group is cyclic of order p^v
                overlap.append((Cyclic(fam.p, mfact[fam.p]), mult))
            comp.append((fam, mult))
        else:
            # Rationals, PAdicComplete, PAdicPrimeFamily: torsion-free, and
            # multiplication by m is injective with isomorphic image.
            comp.append((fam, mult))
    return MSplitResult(
        torsion=normalize(tors + overlap),
        complement=normalize(comp),
        prufer_overlap=normalize(overlap),
        torsion_without_overlap=normalize(tors),
    )


def split_reduced_divisible(spec: GroupSpec) -> tuple[GroupSpec, GroupSpec, GroupSpec]:
    """Partition entries into (torsion-free complete part, reduced torsion, divisible).

    Returns ``(k_part, c_part, d_part)`` where ``k_part`` collects the p-adic
    completion summands, ``c_part`` the reduced torsion summands (cyclic
    singletons and families) and ``d_part`` the divisible summands (rationals
    and quasicyclic).  Direct-summing the three parts reassembles the input.
    """
    k_part: list[Entry] = []
    c_part: list[Entry] = []
    d_part: list[Entry] = []
    for fam, mult in spec.entries:
        if isinstance(fam, (PAdicComplete, PAdicPrimeFamily)):
            k_part.append((fam, mult))
        elif isinstance(fam, (Prufer, Rationals)):
            d_part.append((fam, mult))
        else:
            c_part.append((fam, mult))
    return normalize(k_part), normalize(c_part), normalize(d_part)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class SpecSyntaxError(ValueError):
    """Parse failure; ``position`` is the 0-based offset in the input."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> SpecSyntaxError:
        return SpecSyntaxError(message, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, literal: str) -> bool:
        return self.text.startswith(literal, self.pos)

    def accept(self, literal: str) -> bool:
        self.skip_ws()
        if self.peek(literal):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str) -> None:
        if not self.accept(literal):
            raise self.error(f"expected {literal!r}")

    def nat(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise self.error("expected a number")
        return int(self.text[start : self.pos])

    def prime(self, context: str) -> int:
        self.skip_ws()
        at = self.pos
        n = self.nat()
        try:
            return ensure_prime(n, context)
        except ValueError as exc:
            raise SpecSyntaxError(str(exc), at) from None

    def primeset(self) -> PrimeSet:
        self.skip_ws()
        if self.accept("all"):
            if self.accept("\\{"):
                at = self.pos
                excluded = [self.prime("excluded prime")]
                while self.accept(","):
                    excluded.append(self.prime("excluded prime"))
                self.expect("}")
                if not excluded:  # unreachable: grammar demands one prime
                    raise SpecSyntaxError("empty cofinite complement", at)
                return PrimeSet.cofinite(excluded)
            return ALL_PRIMES
        if self.accept("{"):
            members = [self.prime("prime set member")]
            while self.accept(","):
                members.append(self.prime("prime set member"))
            self.expect("}")
            return PrimeSet.explicit(members)
        raise self.error("expected a prime set")

    def expset(self) -> frozenset[int] | None:
        self.skip_ws()
        if self.accept("all"):
            return None
        if self.accept("{"):
            at = self.pos
            exps = [self.nat()]
            while self.accept(","):
                exps.append(self.nat())
            self.expect("}")
            if any(k < 1 for k in exps):
                raise SpecSyntaxError("exponents must be >= 1", at)
            return frozenset(exps)
        raise self.error("expected an exponent set")

    def atom(self) -> list[Entry]:
        self.skip_ws()
        if self.accept("Zhat("):
            p = self.prime("Zhat argument")
            self.expect(")")
            return [(PAdicComplete(p), _ONE)]
        if self.accept("Z/"):
            at = self.pos
            n = self.nat()
            if n in (0, 1):
                raise SpecSyntaxError(f"Z/{n} is not a valid modulus", at)
            return [(Cyclic(p, k), _ONE) for p, k in sorted(factorize(n).items())]
        if self.accept("Prufer("):
            p = self.prime("Prufer argument")
            self.expect(")")
            return [(Prufer(p), _ONE)]
        if self.accept("Q"):
            return [(Rationals(), _ONE)]
        if self.accept("sumP("):
            ps = self.primeset()
            self.expect(";")
            self.skip_ws()
            if self.accept("Zhat"):
                self.expect(")")
                return [(PAdicPrimeFamily(ps), _ONE)]
            if self.accept("Z/p^"):
                at = self.pos
                k = self.nat()
                if k < 1:
                    raise SpecSyntaxError("exponent must be >= 1", at)
                self.expect(")")
                return [(CyclicPrimeFamily(ps, k), _ONE)]
            raise self.error("expected 'Z/p^k' or 'Zhat'")
        if self.accept("sumK("):
            p = self.prime("sumK prime")
            self.expect(";")
            exps = self.expset()
            self.expect(")")
            return [(CyclicExponentFamily(p, exps), _ONE)]
        raise self.error("expected a summand")

    def mult(self) -> Cardinal:
        self.skip_ws()
        if self.accept("aleph("):
            i = self.nat()
            self.expect(")")
            return Cardinal.aleph(i)
        if self.accept("w"):
            return ALEPH0
        return Cardinal.of(self.nat())

    def term(self) -> list[Entry]:
        entries = self.atom()
        if self.accept("^"):
            m = self.mult()
            entries = [(fam, m) for fam, _ in entries]
        return entries

    def spec(self) -> GroupSpec:
        self.skip_ws()
        if self.accept("0"):
            self.skip_ws()
            if self.pos != len(self.text):
                raise self.error("trailing input after '0'")
            return GroupSpec(())
        entries = self.term()
        while self.accept("+"):
            entries.extend(self.term())
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.error("trailing input")
        return normalize(entries)


def parse_spec(text: str) -> GroupSpec:
    """Parse an expression in the spec grammar and return its normal form.

    >>> str(parse_spec("Z/8^3 + Q^aleph(1)"))
    'Z/8^3 + Q^aleph(1)'
    >>> str(parse_spec("Z/6"))
    'Z/2 + Z/3'
    >>> parse_spec("Zhat(4)")
    Traceback (most recent call last):
        ...
    sb_abelian.groupspec.SpecSyntaxError: Zhat argument: 4 is not a prime number (at position 5)
    """
    return _Parser(text).spec()


# ---------------------------------------------------------------------------
# JSON round-trip
# ---------------------------------------------------------------------------


def spec_to_json(spec: GroupSpec) -> dict:
    return {
        "text": str(spec),
        "entries": [
            {"family": fam.to_json(), "mult": mult.to_json()} for fam, mult in spec.entries
        ],
    }


def spec_from_json(data: Mapping) -> GroupSpec:
    entries = [
        (_summand_from_json(e["family"]), Cardinal.from_json(e["mult"]))
        for e in data["entries"]
    ]
    return normalize(entries)


def spec_json_text(spec: GroupSpec) -> str:
    return json.dumps(spec_to_json(spec), indent=2)
