"""Bi-embeddable, non-isomorphic subgroup pairs inside (completion)^k.

The construction lives in G = (p-adic integers)^k.  Two certified
multiplicatively independent units u1, u2 span a monomial grid
{u1^i u2^j e_s}; two subgroups are cut out by different grid shapes:

* H1 — the pure closure of the span of the full grid {i >= 0, j >= 0};
* H2 — the pure closure of the span of {i >= 1} plus the standard basis
  vectors (the column j-axis above i = 0 is removed, except the origin).

H2 is contained in H1 on the nose, and multiplication by u1 carries H1 into
H2 (its grid shifts one column to the right), so the pair is bi-embeddable.
Elements are kept in exact form — a power of p in the denominator plus
rational coefficients with p-free denominators — because truncated residues
cannot express "lies in the pure closure" at all.

Membership answers are certificate-relative: a support check plus an exact
valuation check decide membership *given* that no small polynomial relation
rewrites one monomial in terms of others, which is what the independence
certificate rules out up to its degree/height/precision bounds.

The direct-sum assemblers combine per-prime pairs into witnesses for groups
with several completion summands, optionally carrying fixed torsion and
divisible parts along.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .groupspec import (
    GroupSpec,
    PAdicComplete,
    PAdicPrimeFamily,
    split_reduced_divisible,
)
from .padic import (
    DEFAULT_INDEPENDENCE_BUDGET,
    AtLeast,
    IndependenceCertificate,
    MatrixModPk,
    NonUnitError,
    PAdicLazy,
    SingularModP,
    independence_certificate,
    matrix_limit_inverse,
    valuation_at_least,
)
from .primes import ensure_prime, p_valuation

__all__ = [
    "CertificateFailed",
    "DuplicatePrimeError",
    "GridElement",
    "GridMonomial",
    "MixedGroupWitness",
    "MultiPrimeWitness",
    "NoKPartError",
    "PAdicWitnessPair",
    "PrecisionInsufficient",
    "UnsupportedMultiplicityError",
    "apply_scalar",
    "build_padic_witness",
    "elementary_matrix_probe",
    "grid_membership",
    "mixed_group_witness",
    "multi_prime_witness",
    "random_member",
]


class CertificateFailed(RuntimeError):
    """No certified unit pair was found within the retry allowance."""

    def __init__(self, attempts: int, last: IndependenceCertificate):
        super().__init__(
            f"no independence certificate after {attempts} seed attempts; "
            f"last violation: {last.violation}"
        )
        self.attempts = attempts
        self.last = last


class PrecisionInsufficient(ValueError):
    """A denominator exponent at or beyond the working precision."""


class DuplicatePrimeError(ValueError):
    """Multi-prime assembly requires pairwise distinct primes."""


class NoKPartError(ValueError):
    """The spec has no completion summand to build on."""


class UnsupportedMultiplicityError(ValueError):
    """Completion summands must occur with finite multiplicity (and not
    range over an infinite family of primes) for a concrete finite witness."""


# ---------------------------------------------------------------------------
# exact grid elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class GridMonomial:
    """u1^i * u2^j * e_s."""

    i: int
    j: int
    s: int

    def __post_init__(self) -> None:
        if self.i < 0 or self.j < 0:
            raise ValueError("exponents must be nonnegative")
        if self.s < 1:
            raise ValueError("coordinate index starts at 1")

    def shift(self, di: int, dj: int) -> "GridMonomial":
        return GridMonomial(self.i + di, self.j + dj, self.s)

    def __str__(self) -> str:
        parts = []
        if self.i:
            parts.append("u1" if self.i == 1 else f"u1^{self.i}")
        if self.j:
            parts.append("u2" if self.j == 1 else f"u2^{self.j}")
        parts.append(f"e{self.s}")
        return "*".join(parts)


def _fraction_p_valuation(q: Fraction, p: int) -> int:
    if q == 0:
        raise ValueError("valuation of 0 is unbounded")
    return p_valuation(q.numerator, p) - p_valuation(q.denominator, p)


@dataclass(frozen=True)
class GridElement:
    """p**-t times an exact rational combination of grid monomials.

    Canonical form: denominators of the coefficients are p-free (p-powers
    are absorbed into t), and when t > 0 at least one coefficient is a
    p-adic unit (common p-factors are cancelled against the denominator).
    """

    p: int
    t: int
    terms: tuple[tuple[GridMonomial, Fraction], ...]

    @classmethod
    def of(
        cls, p: int, coeffs: Mapping[GridMonomial, "Fraction | int"], t: int = 0
    ) -> "GridElement":
        ensure_prime(p, "grid element base")
        if t < 0:
            raise ValueError("denominator exponent must be nonnegative")
        cleaned = {m: Fraction(c) for m, c in coeffs.items() if c != 0}
        if not cleaned:
            return cls(p, 0, ())
        # absorb p-powers hiding in denominators into the global exponent
        lift = max(p_valuation(c.denominator, p) for c in cleaned.values())
        if lift:
            t += lift
            cleaned = {m: c * p**lift for m, c in cleaned.items()}
        # cancel common p-factors of the numerators against p**-t
        drop = min(
            min((_fraction_p_valuation(c, p) for c in cleaned.values()), default=0), t
        )
        if drop:
            t -= drop
            cleaned = {m: c / p**drop for m, c in cleaned.items()}
        return cls(p, t, tuple(sorted(cleaned.items())))

    @classmethod
    def basis_vector(cls, p: int, s: int) -> "GridElement":
        return cls.of(p, {GridMonomial(0, 0, s): 1})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def support(self) -> tuple[GridMonomial, ...]:
        return tuple(m for m, _ in self.terms)

    def coefficient(self, m: GridMonomial) -> Fraction:
        return dict(self.terms).get(m, Fraction(0))

    def __add__(self, other: "GridElement") -> "GridElement":
        if self.p != other.p:
            raise ValueError("cannot add elements at different primes")
        t = max(self.t, other.t)
        total: dict[GridMonomial, Fraction] = {}
        for element in (self, other):
            scale = Fraction(self.p) ** (t - element.t)
            for m, c in element.terms:
                total[m] = total.get(m, Fraction(0)) + c * scale
        return GridElement.of(self.p, total, t)

    def __neg__(self) -> "GridElement":
        return GridElement.of(self.p, {m: -c for m, c in self.terms}, self.t)

    def __sub__(self, other: "GridElement") -> "GridElement":
        return self + (-other)

    def scale(self, q: "Fraction | int") -> "GridElement":
        """Multiply by an exact rational (p in the denominator is fine:
        it raises t)."""
        q = Fraction(q)
        if q == 0:
            return GridElement.of(self.p, {})
        return GridElement.of(self.p, {m: c * q for m, c in self.terms}, self.t)

    def shift(self, di: int, dj: int) -> "GridElement":
        return GridElement.of(
            self.p, {m.shift(di, dj): c for m, c in self.terms}, self.t
        )

    def coordinates(self) -> tuple[int, ...]:
        return tuple(sorted({m.s for m, _ in self.terms}))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        body = " + ".join(
            (f"{c}*{m}" if c != 1 else str(m)) for m, c in self.terms
        ).replace("+ -", "- ")
        if self.t:
            return f"{self.p}^-{self.t} * ({body})"
        return body

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "t": self.t,
            "terms": [
                [m.i, m.j, m.s, c.numerator, c.denominator] for m, c in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "GridElement":
        coeffs = {
            GridMonomial(i, j, s): Fraction(num, den)
            for i, j, s, num, den in data["terms"]
        }
        return cls.of(data["p"], coeffs, data["t"])


# ---------------------------------------------------------------------------
# the witness pair
# ---------------------------------------------------------------------------

_GRID_NAMES = ("H1", "H2")


def _grid_contains(which: str, m: GridMonomial) -> bool:
    if which == "H1":
        return True
    # H2: right half-grid plus the basis column at the origin
    return m.i >= 1 or m.j == 0


@dataclass(frozen=True)
class PAdicWitnessPair:
    """Everything needed to probe the pair (H1, H2) at finite precision."""

    p: int
    k: int
    unit1: PAdicLazy
    unit2: PAdicLazy
    precision: int
    certificate: IndependenceCertificate
    attempts: int

    def grid_contains(self, which: str, m: GridMonomial) -> bool:
        self._check_which(which)
        return _grid_contains(which, m)

    def membership(self, x: GridElement, which: str) -> bool:
        return grid_membership(x, which, self)

    def _check_which(self, which: str) -> None:
        if which not in _GRID_NAMES:
            raise ValueError(f"unknown subgroup name {which!r}; use H1 or H2")

    def coordinate_sum(self, x: GridElement, s: int) -> int:
        """Residue of coordinate s of p**t * x at the working precision."""
        modulus = self.p**self.precision
        u1 = self.unit1.truncate(self.precision).residue
        u2 = self.unit2.truncate(self.precision).residue
        total = 0
        for m, c in x.terms:
            if m.s != s:
                continue
            value = pow(u1, m.i, modulus) * pow(u2, m.j, modulus) % modulus
            total += c.numerator * pow(c.denominator, -1, modulus) * value
        return total % modulus

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "precision": self.precision,
            "unit1": self.unit1.description,
            "unit2": self.unit2.description,
            "attempts": self.attempts,
            "certificate": self.certificate.to_json(),
            "grids": {
                "H1": "all (i, j)",
                "H2": "i >= 1, plus (0, 0)",
            },
        }


def build_padic_witness(
    p: int,
    k: int,
    seed: int = 0,
    max_exponent: int = 2,
    height_bound: int = 2,
    precision: int = 40,
    retries: int = 8,
    budget: "int | None" = DEFAULT_INDEPENDENCE_BUDGET,
) -> PAdicWitnessPair:
    """Draw and certify a unit pair, retrying with fresh seeds on failure.

    The returned descriptor fixes (p, k, units, precision, certificate);
    all membership probes are made against it.
    """
    ensure_prime(p, "witness prime")
    if k < 1:
        raise ValueError("need at least one coordinate (k >= 1)")
    if retries < 1:
        raise ValueError("need at least one attempt")
    last = None
    for attempt in range(retries):
        base = seed + 1_000_003 * attempt
        unit1 = PAdicLazy.from_seed(p, 2 * base)
        unit2 = PAdicLazy.from_seed(p, 2 * base + 1)
        cert = independence_certificate(
            unit1, unit2, max_exponent, height_bound, precision, budget=budget
        )
        if cert.passed:
            return PAdicWitnessPair(
                p=p,
                k=k,
                unit1=unit1,
                unit2=unit2,
                precision=precision,
                certificate=cert,
                attempts=attempt + 1,
            )
        last = cert
    raise CertificateFailed(retries, last)


def grid_membership(x: GridElement, which: str, w: PAdicWitnessPair) -> bool:
    """Does x lie in the designated pure closure, at the pair's precision?

    True iff (a) the support uses only designated grid monomials with
    coordinate index <= k, and (b) every coordinate sum is divisible by
    p**t.  (b) is decided exactly because t < precision; (a) is where the
    independence certificate carries the weight.
    """
    w._check_which(which)
    if x.p != w.p:
        raise ValueError("element and witness pair use different primes")
    if x.t >= w.precision:
        raise PrecisionInsufficient(
            f"denominator exponent {x.t} at precision {w.precision}"
        )
    for m in x.support:
        if m.s > w.k:
            raise ValueError(f"coordinate {m.s} exceeds k={w.k}")
        if not _grid_contains(which, m):
            return False
    if x.t == 0:
        return True
    for s in x.coordinates():
        residue = w.coordinate_sum(x, s)
        v: "int | AtLeast"
        v = AtLeast(w.precision) if residue == 0 else p_valuation(residue, w.p)
        if not valuation_at_least(v, x.t):
            return False
    return True


def apply_scalar(
    w: PAdicWitnessPair, alpha: "str | int | Fraction", x: GridElement
) -> GridElement:
    """Multiply x by a unit scalar, in exact representation.

    alpha is one of the grid units ("unit1" shifts i by one, "unit2" shifts
    j by one) or an exact rational that is a p-adic unit.  Arbitrary p-adic
    scalars have no exact image in the grid representation and are rejected.
    """
    if alpha == "unit1":
        return x.shift(1, 0)
    if alpha == "unit2":
        return x.shift(0, 1)
    if isinstance(alpha, str):
        raise ValueError(f"unknown symbolic scalar {alpha!r}")
    q = Fraction(alpha)
    if q == 0 or _fraction_p_valuation(q, w.p) != 0:
        raise NonUnitError(f"{alpha} is not a unit at p={w.p}")
    return x.scale(q)


def random_member(
    w: PAdicWitnessPair, rng: random.Random, which: str = "H1", max_t: int = 3
) -> GridElement:
    """A seeded random element of H1 or H2 (used by probe transcripts).

    Draws a small integer combination of designated grid monomials, then
    with positive probability upgrades it to a genuine denominator-bearing
    member: (u1 - r) * y is divisible by p**t when r matches u1's
    truncation, so dividing by p**t stays inside the pure closure.
    """
    w._check_which(which)
    coeffs: dict[GridMonomial, Fraction] = {}
    for _ in range(rng.randint(1, 4)):
        while True:
            m = GridMonomial(rng.randint(0, 3), rng.randint(0, 3), rng.randint(1, w.k))
            if _grid_contains(which, m):
                break
        coeffs[m] = coeffs.get(m, Fraction(0)) + rng.randint(-3, 3)
    y = GridElement.of(w.p, coeffs)
    t = rng.randint(0, max_t)
    if t == 0 or y.is_zero:
        return y
    r = w.unit1.truncate(t).residue
    lifted = y.shift(1, 0) - y.scale(r)  # (u1 - r) * y, divisible by p**t
    return lifted.scale(Fraction(1, w.p**t))


def elementary_matrix_probe(w: PAdicWitnessPair, seed: int = 0) -> dict:
    """Sample an invertible k x k matrix and verify its inverse tower.

    Any finite-precision record of an embedding between the pair is a
    compatible matrix sequence; this probe checks the machinery on a seeded
    sample: the tower of reductions A mod p^n must invert levelwise, with
    A_n B_n = B_n A_n = I for every n up to the working precision.
    """
    rng = random.Random(f"matrix-probe:{w.p}:{w.k}:{seed}")
    n, p, k = w.precision, w.p, w.k
    while True:
        top = MatrixModPk.of(
            [[rng.randrange(p**n) for _ in range(k)] for _ in range(k)], p, n
        )
        try:
            tower = [top.reduce_to(level) for level in range(1, n + 1)]
            inverse_tower = matrix_limit_inverse(tower)
            break
        except SingularModP:
            continue
    checked = all(
        (tower[i] @ inverse_tower[i]).is_identity()
        and (inverse_tower[i] @ tower[i]).is_identity()
        for i in range(n)
    )
    return {
        "p": p,
        "k": k,
        "levels": n,
        "matrix": [list(row) for row in top.rows],
        "inverse": [list(row) for row in inverse_tower[-1].rows],
        "identity_at_all_levels": checked,
    }


# ---------------------------------------------------------------------------
# direct-sum assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiPrimeWitness:
    """Componentwise witness pairs for a direct sum over distinct primes.

    Any group map between such sums is componentwise: a cross-prime image
    would be an element of a reduced group with infinite height at its own
    prime, which only 0 has.  The finite-height probes document that the
    sampled nonzero elements indeed have small height.
    """

    components: tuple[PAdicWitnessPair, ...]
    height_probes: tuple[dict, ...]

    def to_json(self) -> dict:
        return {
            "components": [c.to_json() for c in self.components],
            "height_probes": list(self.height_probes),
            "rationale": (
                "maps between the sums act componentwise: nonzero elements "
                "of a reduced group have finite height at its prime"
            ),
        }


def _height_probe(w: PAdicWitnessPair, seed: int) -> dict:
    rng = random.Random(f"height-probe:{w.p}:{seed}")
    observed = []
    for _ in range(10):
        x = random_member(w, rng)
        if x.is_zero:
            continue
        for s in x.coordinates():
            residue = w.coordinate_sum(x, s)
            if residue:
                observed.append(p_valuation(residue, w.p) - x.t)
    return {
        "p": w.p,
        "max_valuation_seen": max(observed, default=0),
        "bound": w.precision,
        "finite": bool(observed)
        and max(observed) < w.precision,
    }


def multi_prime_witness(
    pairs: Sequence[tuple[int, int]],
    seed: int = 0,
    max_exponent: int = 2,
    height_bound: int = 2,
    precision: int = 40,
) -> MultiPrimeWitness:
    """Witness pairs for a direct sum of completion powers, one per prime."""
    if not pairs:
        raise ValueError("at least one (prime, power) component is required")
    primes = [p for p, _ in pairs]
    if len(set(primes)) != len(primes):
        raise DuplicatePrimeError(f"repeated primes in {primes}")
    components = []
    probes = []
    for idx, (p, k) in enumerate(pairs):
        w = build_padic_witness(
            p,
            k,
            seed=seed + idx,
            max_exponent=max_exponent,
            height_bound=height_bound,
            precision=precision,
        )
        components.append(w)
        probes.append(_height_probe(w, seed))
    return MultiPrimeWitness(tuple(components), tuple(probes))


@dataclass(frozen=True)
class MixedGroupWitness:
    """A completion-part witness carried through fixed torsion/divisible parts.

    For a spec K + C + D (completions, reduced torsion, divisible), the two
    non-isomorphic sides are H1 + C + D and H2 + C + D: an isomorphism would
    restrict to the torsion-free reduced cores and identify H1 with H2.
    """

    base: GroupSpec
    torsion: GroupSpec
    divisible: GroupSpec
    core: MultiPrimeWitness

    def to_json(self) -> dict:
        return {
            "base": str(self.base),
            "shared_torsion": str(self.torsion),
            "shared_divisible": str(self.divisible),
            "core": self.core.to_json(),
            "rationale": (
                "an isomorphism of the sums restricts to the torsion-free "
                "reduced cores, where the componentwise pairs differ"
            ),
        }


def mixed_group_witness(
    spec: GroupSpec,
    seed: int = 0,
    max_exponent: int = 2,
    height_bound: int = 2,
    precision: int = 40,
) -> MixedGroupWitness:
    """Split a spec into completion + torsion + divisible parts and build
    the witness on the completion part.

    Requires at least one completion summand of finite multiplicity; prime
    families and infinite powers have no finite componentwise descriptor and
    are rejected.
    """
    k_part, c_part, d_part = split_reduced_divisible(spec)
    if k_part.is_trivial:
        raise NoKPartError(f"{spec} has no completion summand")
    pairs = []
    for fam, mult in k_part.entries:
        if isinstance(fam, PAdicPrimeFamily):
            raise UnsupportedMultiplicityError(
                "completion summands ranging over a prime family cannot be "
                "assembled componentwise; pick finitely many primes"
            )
        assert isinstance(fam, PAdicComplete)
        if not mult.is_finite:
            raise UnsupportedMultiplicityError(
                f"completion power at p={fam.p} has infinite multiplicity; "
                "a concrete witness needs a finite power"
            )
        pairs.append((fam.p, mult.value))
    core = multi_prime_witness(
        pairs,
        seed=seed,
        max_exponent=max_exponent,
        height_bound=height_bound,
        precision=precision,
    )
    return MixedGroupWitness(base=spec, torsion=c_part, divisible=d_part, core=core)
