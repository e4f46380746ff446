"""Truncated p-adic integer arithmetic with explicit precision tracking.

Everything here works at a finite precision N: a p-adic integer is only ever
seen through its residue mod p**N.  The classes keep the bookkeeping honest —
valuations are reported as an exact number or as the symbol "at least N",
never guessed past the precision.

* :class:`PAdicApprox` — immutable residue mod p**N with ring operations,
  unit inverse and valuation.
* :class:`PAdicLazy` — a p-adic integer given by a deterministic digit
  stream (seeded, integer, rational, or derived), truncatable to any
  precision.  Digit prefixes are cached behind a lock so concurrent readers
  see a coherent prefix.
* :class:`MatrixModPk` / :func:`matrix_limit_inverse` — square matrices mod
  p**N and a compatible tower of inverses lifted level by level.
* :class:`IntPolynomial2` / :func:`independence_certificate` — two-variable
  integer polynomials and an exhaustive bounded search certifying that two
  units satisfy no small polynomial relation to precision N.
"""

from __future__ import annotations

import hashlib
import random
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .primes import ensure_prime, p_valuation

__all__ = [
    "AtLeast",
    "BudgetExceeded",
    "DEFAULT_INDEPENDENCE_BUDGET",
    "IndependenceCertificate",
    "IntPolynomial2",
    "MatrixModPk",
    "NonUnitError",
    "PAdicApprox",
    "PAdicLazy",
    "PrecisionMismatch",
    "SingularModP",
    "independence_certificate",
    "matrix_limit_inverse",
    "valuation_at_least",
]


class PrecisionMismatch(ValueError):
    """Operands live at different primes or precisions."""


class NonUnitError(ArithmeticError):
    """Inverse requested for an element divisible by p."""


class SingularModP(ArithmeticError):
    """Matrix is not invertible modulo p."""


class BudgetExceeded(RuntimeError):
    """A search space exceeds the configured candidate budget."""


@dataclass(frozen=True, order=True)
class AtLeast:
    """A valuation known only to be >= ``bound`` (the element vanished
    to the full working precision)."""

    bound: int

    def __str__(self) -> str:
        return f">={self.bound}"


def valuation_at_least(v: "int | AtLeast", k: int) -> bool:
    """Is the (possibly truncated) valuation ``v`` at least ``k``?

    For :class:`AtLeast` the answer is decided by the recorded bound, which
    is only sound for ``k`` up to the precision the value was computed at.
    """
    if isinstance(v, AtLeast):
        return v.bound >= k
    return v >= k


# ---------------------------------------------------------------------------
# fixed-precision residues
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PAdicApprox:
    """A p-adic integer truncated to ``residue`` mod p**precision."""

    p: int
    precision: int
    residue: int

    def __post_init__(self) -> None:
        ensure_prime(self.p, "p-adic base")
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        if not 0 <= self.residue < self.modulus:
            raise ValueError("residue out of range; use PAdicApprox.of")

    @classmethod
    def of(cls, value: int, p: int, precision: int) -> "PAdicApprox":
        return cls(p, precision, value % p**precision)

    @classmethod
    def zero(cls, p: int, precision: int) -> "PAdicApprox":
        return cls(p, precision, 0)

    @classmethod
    def one(cls, p: int, precision: int) -> "PAdicApprox":
        return cls.of(1, p, precision)

    @property
    def modulus(self) -> int:
        return self.p**self.precision

    @property
    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def _check(self, other: "PAdicApprox") -> None:
        if (self.p, self.precision) != (other.p, other.precision):
            raise PrecisionMismatch(
                f"cannot combine mod {self.p}^{self.precision} "
                f"with mod {other.p}^{other.precision}"
            )

    def __add__(self, other: "PAdicApprox") -> "PAdicApprox":
        self._check(other)
        return PAdicApprox.of(self.residue + other.residue, self.p, self.precision)

    def __sub__(self, other: "PAdicApprox") -> "PAdicApprox":
        self._check(other)
        return PAdicApprox.of(self.residue - other.residue, self.p, self.precision)

    def __mul__(self, other: "PAdicApprox") -> "PAdicApprox":
        self._check(other)
        return PAdicApprox.of(self.residue * other.residue, self.p, self.precision)

    def __neg__(self) -> "PAdicApprox":
        return PAdicApprox.of(-self.residue, self.p, self.precision)

    def __pow__(self, exponent: int) -> "PAdicApprox":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return PAdicApprox(
            self.p, self.precision, pow(self.residue, exponent, self.modulus)
        )

    def scale(self, n: int) -> "PAdicApprox":
        """Multiply by an ordinary integer."""
        return PAdicApprox.of(self.residue * n, self.p, self.precision)

    def inverse(self) -> "PAdicApprox":
        if not self.is_unit:
            raise NonUnitError(f"{self.residue} is divisible by {self.p}")
        return PAdicApprox(
            self.p, self.precision, pow(self.residue, -1, self.modulus)
        )

    def valuation(self) -> "int | AtLeast":
        """Exact p-valuation when visible, else ``AtLeast(precision)``."""
        if self.residue == 0:
            return AtLeast(self.precision)
        return p_valuation(self.residue, self.p)

    def reduce_to(self, precision: int) -> "PAdicApprox":
        if precision > self.precision:
            raise PrecisionMismatch(
                f"cannot raise precision {self.precision} to {precision}"
            )
        return PAdicApprox.of(self.residue, self.p, precision)

    def __str__(self) -> str:
        return f"{self.residue} (mod {self.p}^{self.precision})"


# ---------------------------------------------------------------------------
# lazy digit streams
# ---------------------------------------------------------------------------


def _stable_rng(p: int, seed: int) -> random.Random:
    # hash the (p, seed) pair down to an int so the stream never depends on
    # interpreter hash randomization
    digest = hashlib.sha256(f"padic-digits:{p}:{seed}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


class PAdicLazy:
    """A p-adic integer producible to any precision.

    The digit source is consulted sequentially and the prefix is cached, so
    ``truncate(N)`` and ``truncate(M)`` always agree mod p**min(N, M).
    """

    def __init__(
        self,
        p: int,
        digit_source: Callable[[int], int],
        description: str,
        seed: int | None = None,
    ):
        ensure_prime(p, "p-adic base")
        self.p = p
        self.description = description
        self.seed = seed
        self._digit_source = digit_source
        self._digits: list[int] = []
        self._prefix: list[int] = [0]  # _prefix[i] = residue mod p**i
        self._lock = threading.Lock()

    @classmethod
    def from_seed(cls, p: int, seed: int, unit: bool = True) -> "PAdicLazy":
        """Deterministic pseudorandom digit stream for the given seed.

        With ``unit=True`` (the default) the constant digit is forced
        nonzero so the value is invertible.
        """
        rng = _stable_rng(p, seed)

        def digit(i: int) -> int:
            if i == 0 and unit:
                return 1 + rng.randrange(p - 1)
            return rng.randrange(p)

        return cls(p, digit, f"seeded({seed})", seed=seed)

    @classmethod
    def from_int(cls, p: int, n: int) -> "PAdicLazy":
        return cls(p, lambda i: (n // p**i) % p, f"int({n})")

    @classmethod
    def from_rational(cls, p: int, numerator: int, denominator: int) -> "PAdicLazy":
        """Embed numerator/denominator; the denominator must be prime to p."""
        if denominator % p == 0:
            raise NonUnitError(f"denominator {denominator} is divisible by {p}")

        def digit(i: int) -> int:
            modulus = p ** (i + 1)
            residue = numerator * pow(denominator, -1, modulus) % modulus
            return residue // p**i

        return cls(p, digit, f"rational({numerator}/{denominator})")

    @classmethod
    def from_truncations(
        cls, p: int, residue_at: Callable[[int], int], description: str
    ) -> "PAdicLazy":
        """Wrap a coherent residue function N -> value mod p**N.

        Coherence (residue_at(M) = residue_at(N) mod p**N for M >= N) is the
        caller's responsibility; it holds automatically for anything computed
        by ring operations from coherent inputs.
        """
        return cls(
            p, lambda i: (residue_at(i + 1) // p**i) % p, description
        )

    def digit(self, i: int) -> int:
        with self._lock:
            self._extend(i + 1)
            return self._digits[i]

    def truncate(self, precision: int) -> PAdicApprox:
        if precision < 1:
            raise ValueError("precision must be >= 1")
        with self._lock:
            self._extend(precision)
            return PAdicApprox(self.p, precision, self._prefix[precision])

    def _extend(self, n: int) -> None:
        while len(self._digits) < n:
            i = len(self._digits)
            d = self._digit_source(i)
            if not 0 <= d < self.p:
                raise ValueError(f"digit source produced {d} at index {i}")
            self._digits.append(d)
            self._prefix.append(self._prefix[i] + d * self.p**i)

    def __repr__(self) -> str:
        return f"PAdicLazy(p={self.p}, {self.description})"


# ---------------------------------------------------------------------------
# matrices mod p**N and inverse towers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatrixModPk:
    """A square matrix over Z/p**precision."""

    p: int
    precision: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        ensure_prime(self.p, "matrix base")
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        k = len(self.rows)
        if k == 0 or any(len(row) != k for row in self.rows):
            raise ValueError("matrix must be square and nonempty")
        m = self.modulus
        if any(not 0 <= e < m for row in self.rows for e in row):
            raise ValueError("entries out of range; use MatrixModPk.of")

    @classmethod
    def of(
        cls, rows: Iterable[Iterable[int]], p: int, precision: int
    ) -> "MatrixModPk":
        m = p**precision
        return cls(p, precision, tuple(tuple(e % m for e in row) for row in rows))

    @classmethod
    def identity(cls, size: int, p: int, precision: int) -> "MatrixModPk":
        return cls.of(
            [[1 if i == j else 0 for j in range(size)] for i in range(size)],
            p,
            precision,
        )

    @property
    def size(self) -> int:
        return len(self.rows)

    @property
    def modulus(self) -> int:
        return self.p**self.precision

    def __matmul__(self, other: "MatrixModPk") -> "MatrixModPk":
        if (self.p, self.precision) != (other.p, other.precision):
            raise PrecisionMismatch("matrix product needs matching p and precision")
        if self.size != other.size:
            raise ValueError("matrix sizes differ")
        m = self.modulus
        k = self.size
        cols = list(zip(*other.rows))
        return MatrixModPk(
            self.p,
            self.precision,
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) % m for col in cols)
                for row in self.rows
            ),
        )

    def is_identity(self) -> bool:
        return self == MatrixModPk.identity(self.size, self.p, self.precision)

    def reduce_to(self, precision: int) -> "MatrixModPk":
        if precision > self.precision:
            raise PrecisionMismatch(
                f"cannot raise precision {self.precision} to {precision}"
            )
        return MatrixModPk.of(self.rows, self.p, precision)


def _invert_mod_p(rows: list[list[int]], p: int) -> list[list[int]]:
    """Gauss-Jordan inverse over the field Z/p; raises SingularModP."""
    k = len(rows)
    a = [row[:] + [1 if i == j else 0 for j in range(k)] for i, row in enumerate(rows)]
    for col in range(k):
        pivot = next((r for r in range(col, k) if a[r][col] % p != 0), None)
        if pivot is None:
            raise SingularModP(f"matrix has no inverse modulo {p}")
        a[col], a[pivot] = a[pivot], a[col]
        inv = pow(a[col][col], -1, p)
        a[col] = [e * inv % p for e in a[col]]
        for r in range(k):
            if r != col and a[r][col] % p:
                factor = a[r][col]
                a[r] = [(e - factor * c) % p for e, c in zip(a[r], a[col])]
    return [row[k:] for row in a]


def matrix_limit_inverse(a_seq: Sequence[MatrixModPk]) -> list[MatrixModPk]:
    """Inverse tower for a compatible sequence of matrices mod p, p^2, ...

    ``a_seq[n-1]`` must have precision n and reduce to ``a_seq[m-1]`` for
    m <= n.  Returns ``b_seq`` of the same shape with
    ``a_seq[n-1] @ b_seq[n-1]`` and ``b_seq[n-1] @ a_seq[n-1]`` both the
    identity at every level.  The base inverse is computed modulo p and then
    lifted, doubling the precision each round.
    """
    if not a_seq:
        raise ValueError("empty matrix sequence")
    top = a_seq[-1]
    depth = len(a_seq)
    if top.precision != depth:
        raise ValueError("sequence must have precisions 1..N in order")
    for n, mat in enumerate(a_seq, start=1):
        if (mat.p, mat.size) != (top.p, top.size):
            raise PrecisionMismatch("sequence entries disagree on p or size")
        if mat.precision != n:
            raise ValueError("sequence must have precisions 1..N in order")
        if top.reduce_to(n) != mat:
            raise ValueError(f"sequence is not reduction-compatible at level {n}")

    p, k = top.p, top.size
    a_full = [list(row) for row in top.rows]
    b = _invert_mod_p([list(row) for row in top.reduce_to(1).rows], p)
    reached = 1
    while reached < depth:
        reached = min(2 * reached, depth)
        m = p**reached
        # one lifting round: b <- b (2I - a b), exact Newton step mod p**reached
        ab = [
            [sum(a_full[i][t] * b[t][j] for t in range(k)) % m for j in range(k)]
            for i in range(k)
        ]
        correction = [
            [(2 if i == j else 0) - ab[i][j] for j in range(k)] for i in range(k)
        ]
        b = [
            [
                sum(b[i][t] * correction[t][j] for t in range(k)) % m
                for j in range(k)
            ]
            for i in range(k)
        ]
    return [MatrixModPk.of(b, p, n) for n in range(1, depth + 1)]


# ---------------------------------------------------------------------------
# small integer polynomials in two variables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntPolynomial2:
    """An integer polynomial in x and y with finite support.

    Terms are kept sorted by (x-exponent, y-exponent) with zero coefficients
    dropped, so equal polynomials compare equal.
    """

    terms: tuple[tuple[tuple[int, int], int], ...]

    @classmethod
    def of(cls, coefficients: Mapping[tuple[int, int], int]) -> "IntPolynomial2":
        cleaned = []
        for (i, j), c in coefficients.items():
            if i < 0 or j < 0:
                raise ValueError("exponents must be nonnegative")
            if c != 0:
                cleaned.append(((i, j), c))
        return cls(tuple(sorted(cleaned)))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def max_exponent(self) -> int:
        """Largest exponent of either variable (0 for the zero polynomial)."""
        return max((max(i, j) for (i, j), _ in self.terms), default=0)

    @property
    def height(self) -> int:
        return max((abs(c) for _, c in self.terms), default=0)

    def canonical_sign(self) -> "IntPolynomial2":
        """Negate if needed so the first term's coefficient is positive."""
        if self.terms and self.terms[0][1] < 0:
            return IntPolynomial2(tuple((ij, -c) for ij, c in self.terms))
        return self

    def evaluate(self, x: PAdicApprox, y: PAdicApprox) -> PAdicApprox:
        if (x.p, x.precision) != (y.p, y.precision):
            raise PrecisionMismatch("evaluation points disagree on p or precision")
        m = x.modulus
        total = 0
        for (i, j), c in self.terms:
            total += c * pow(x.residue, i, m) * pow(y.residue, j, m)
        return PAdicApprox.of(total, x.p, x.precision)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for (i, j), c in self.terms:
            factors = []
            if abs(c) != 1 or (i, j) == (0, 0):
                factors.append(str(abs(c)))
            if i:
                factors.append("x" if i == 1 else f"x^{i}")
            if j:
                factors.append("y" if j == 1 else f"y^{j}")
            term = "*".join(factors)
            parts.append(("- " if c < 0 else "+ ") + term)
        rendered = " ".join(parts)
        return rendered[2:] if rendered.startswith("+ ") else "-" + rendered[2:]

    def to_json(self) -> list[list[int]]:
        return [[i, j, c] for (i, j), c in self.terms]

    @classmethod
    def from_json(cls, data: Iterable[Iterable[int]]) -> "IntPolynomial2":
        return cls.of({(i, j): c for i, j, c in data})


# ---------------------------------------------------------------------------
# independence certificates
# ---------------------------------------------------------------------------

DEFAULT_INDEPENDENCE_BUDGET = 10_000_000


@dataclass(frozen=True)
class IndependenceCertificate:
    """Outcome of the exhaustive search for a small vanishing relation.

    ``passed`` means: no nonzero integer polynomial with exponents at most
    ``max_exponent`` and coefficients bounded by ``height_bound`` evaluates
    to 0 mod p**precision at the pair.  All downstream claims that rely on
    the pair being unrelated are relative to these three parameters.
    """

    p: int
    max_exponent: int
    height_bound: int
    precision: int
    sources: tuple[str, str]
    passed: bool
    violation: IntPolynomial2 | None
    candidates: int

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "max_exponent": self.max_exponent,
            "height_bound": self.height_bound,
            "precision": self.precision,
            "sources": list(self.sources),
            "passed": self.passed,
            "violation": None if self.violation is None else self.violation.to_json(),
            "candidates": self.candidates,
        }


def independence_certificate(
    g1: PAdicLazy,
    g2: PAdicLazy,
    max_exponent: int,
    height_bound: int,
    precision: int,
    budget: int | None = DEFAULT_INDEPENDENCE_BUDGET,
) -> IndependenceCertificate:
    """Exhaustively search for a small polynomial relation between two units.

    Checks every nonzero q in Z[x, y] with exponents <= max_exponent in each
    variable and coefficients in [-height_bound, height_bound] for
    q(g1, g2) = 0 mod p**precision.  The monomial count is (d+1)^2 and the
    candidate count (2B+1)^((d+1)^2); a budget smaller than that raises
    :class:`BudgetExceeded` up front rather than certifying a partial search.
    """
    if g1.p != g2.p:
        raise PrecisionMismatch("the two values live at different primes")
    if max_exponent < 1 or height_bound < 1 or precision < 1:
        raise ValueError("max_exponent, height_bound, precision must be >= 1")
    if g1.digit(0) == 0 or g2.digit(0) == 0:
        raise NonUnitError("independence search requires unit inputs")

    d, height = max_exponent, height_bound
    pairs = [(i, j) for i in range(d + 1) for j in range(d + 1)]
    candidates = (2 * height + 1) ** len(pairs)
    if budget is not None and candidates > budget:
        raise BudgetExceeded(
            f"{candidates} candidate polynomials exceed the budget of {budget}"
        )

    p = g1.p
    modulus = p**precision
    x = g1.truncate(precision).residue
    y = g2.truncate(precision).residue
    values = [pow(x, i, modulus) * pow(y, j, modulus) % modulus for i, j in pairs]

    # The trailing monomial x^d y^d is a unit, so once the other coefficients
    # are fixed there is exactly one residue class for the last coefficient
    # that makes the sum vanish; only that class needs testing.
    last_inv = pow(values[-1], -1, modulus)
    coeffs = [0] * len(pairs)
    violation: IntPolynomial2 | None = None

    def search(pos: int, acc: int, any_nonzero: bool) -> bool:
        nonlocal violation
        if pos == len(pairs) - 1:
            solved = -acc * last_inv % modulus
            # every admissible last coefficient lies in this residue class;
            # usually at most one representative falls within the height bound
            start = solved - (solved + height) // modulus * modulus
            for c in range(start, height + 1, modulus):
                if c == 0 and not any_nonzero:
                    continue
                coeffs[pos] = c
                violation = IntPolynomial2.of(
                    dict(zip(pairs, coeffs))
                ).canonical_sign()
                return True
            return False
        for c in range(-height, height + 1):
            coeffs[pos] = c
            if search(pos + 1, (acc + c * values[pos]) % modulus, any_nonzero or c != 0):
                return True
        return False

    found = search(0, 0, False)
    return IndependenceCertificate(
        p=p,
        max_exponent=d,
        height_bound=height,
        precision=precision,
        sources=(g1.description, g2.description),
        passed=not found,
        violation=violation,
        candidates=candidates,
    )
