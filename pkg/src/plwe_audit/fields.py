"""Exact arithmetic in F_q and in binomial extension fields F_q[y]/(y^n - a).

Residues are stored canonically in [0, q).  Centered representatives and the
quarter-interval test are exposed as exact integer predicates so that interval
counts agree with rational enumeration; no floating point is involved anywhere
in this module.
"""

from __future__ import annotations

from dataclasses import dataclass


class FieldError(Exception):
    """Base class for arithmetic errors raised by this module."""


class DivisionByZero(FieldError):
    """Inversion of the zero element."""


class ContextMismatch(FieldError):
    """Operands belong to different moduli or extension contexts."""


class ZeroHasNoOrder(FieldError):
    """The multiplicative order of zero is undefined."""


# Products of two residues must fit in 128-bit intermediates.
MAX_MODULUS = 1 << 62

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(m: int) -> bool:
    """Deterministic Miller-Rabin; the fixed base set is exact below 3.3e24."""
    if m < 2:
        return False
    for p in _MR_BASES:
        if m % p == 0:
            return m == p
    d, r = m - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for base in _MR_BASES:
        x = pow(base, d, m)
        if x == 1 or x == m - 1:
            continue
        for _ in range(r - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def prime_factors(m: int) -> list[int]:
    """Distinct prime factors by trial division."""
    out: list[int] = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        out.append(m)
    return out


@dataclass(frozen=True)
class PrimeModulus:
    """An odd prime modulus q with 2 < q < 2**62."""

    q: int

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or not (2 < self.q < MAX_MODULUS):
            raise ValueError(f"q must satisfy 2 < q < 2**62, got {self.q!r}")
        if not is_prime(self.q):
            raise ValueError(f"q must be prime, got {self.q}")

    @property
    def q_mod4(self) -> int:
        return self.q % 4

    def element(self, value: int) -> FieldElement:
        return FieldElement(value % self.q, self)


@dataclass(frozen=True)
class FieldElement:
    """A canonical residue in [0, q)."""

    value: int
    modulus: PrimeModulus

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", self.value % self.modulus.q)

    @property
    def q(self) -> int:
        return self.modulus.q

    def _same(self, other: FieldElement) -> None:
        if self.modulus != other.modulus:
            raise ContextMismatch(f"moduli differ: {self.q} vs {other.q}")

    def __add__(self, other: FieldElement) -> FieldElement:
        self._same(other)
        return FieldElement((self.value + other.value) % self.q, self.modulus)

    def __sub__(self, other: FieldElement) -> FieldElement:
        self._same(other)
        return FieldElement((self.value - other.value) % self.q, self.modulus)

    def __mul__(self, other: FieldElement) -> FieldElement:
        self._same(other)
        return FieldElement(self.value * other.value % self.q, self.modulus)

    def __neg__(self) -> FieldElement:
        return FieldElement(-self.value % self.q, self.modulus)

    def __pow__(self, exponent: int) -> FieldElement:
        if exponent < 0 and self.value == 0:
            raise DivisionByZero("cannot raise zero to a negative power")
        return FieldElement(pow(self.value, exponent, self.q), self.modulus)

    def inv(self) -> FieldElement:
        if self.value == 0:
            raise DivisionByZero(f"zero is not invertible mod {self.q}")
        return FieldElement(pow(self.value, self.q - 2, self.q), self.modulus)

    def __int__(self) -> int:
        return self.value


def centered_value(v: int, q: int) -> int:
    """The unique c with c == v (mod q) and -(q-1)/2 <= c <= (q-1)/2."""
    v %= q
    return v - q if 2 * v > q else v


def centered(x: FieldElement) -> int:
    return centered_value(x.value, x.q)


def in_quarter_value(v: int, q: int) -> bool:
    """True iff the centered representative c of v satisfies -q <= 4c < q.

    Exact integer form of membership in [-q/4, q/4); the lower bound is
    inclusive, the upper exclusive.
    """
    v %= q
    return 4 * v < q or 4 * v >= 3 * q


def in_quarter_interval(x: FieldElement) -> bool:
    return in_quarter_value(x.value, x.q)


def mult_order(a: FieldElement) -> int:
    """Least r >= 1 with a**r == 1, via the factorization of q - 1."""
    if a.value == 0:
        raise ZeroHasNoOrder("the zero element has no multiplicative order")
    q = a.q
    order = q - 1
    for p in prime_factors(q - 1):
        while order % p == 0 and pow(a.value, order // p, q) == 1:
            order //= p
    return order


def is_irreducible_binomial(n: int, a: FieldElement) -> bool:
    """Decide whether y**n - a is irreducible over F_q.

    Classical criterion: every prime factor of n must divide ord(a) and must
    not divide (q-1)/ord(a); when 4 | n, additionally q == 1 (mod 4).
    """
    if n < 1:
        raise ValueError(f"degree must be >= 1, got {n}")
    if n == 1:
        return True
    if a.value == 0:
        return False
    e = mult_order(a)
    cofactor = (a.q - 1) // e
    for p in prime_factors(n):
        if e % p != 0 or cofactor % p == 0:
            return False
    if n % 4 == 0 and a.q % 4 != 1:
        return False
    return True


@dataclass(frozen=True)
class ExtFieldCtx:
    """The extension F_{q^n} presented as F_q[y]/(y^n - a).

    Irreducibility of the defining binomial is checked at construction, so a
    context is always a genuine field.
    """

    n: int
    a: FieldElement

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"extension degree must be >= 1, got {self.n}")
        if self.n >= 2 and self.a.value == 0:
            raise ValueError("the binomial constant must be nonzero for n >= 2")
        if not is_irreducible_binomial(self.n, self.a):
            raise ValueError(
                f"y^{self.n} - {self.a.value} is reducible mod {self.a.q}"
            )

    @property
    def modulus(self) -> PrimeModulus:
        return self.a.modulus

    @property
    def q(self) -> int:
        return self.a.q

    def element(self, coeffs) -> ExtFieldElement:
        cs = tuple(int(c) % self.q for c in coeffs)
        if len(cs) != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {len(cs)}")
        return ExtFieldElement(cs, self)

    def from_base(self, x: FieldElement | int) -> ExtFieldElement:
        v = x.value if isinstance(x, FieldElement) else int(x) % self.q
        return ExtFieldElement((v,) + (0,) * (self.n - 1), self)

    def zero(self) -> ExtFieldElement:
        return self.from_base(0)

    def one(self) -> ExtFieldElement:
        return self.from_base(1)

    def alpha(self) -> ExtFieldElement:
        """The class of y, a root of y^n - a."""
        if self.n == 1:
            return self.from_base(self.a)
        return ExtFieldElement((0, 1) + (0,) * (self.n - 2), self)


@dataclass(frozen=True)
class ExtFieldElement:
    """An element of F_{q^n}; coordinate i is the coefficient of y^i."""

    coeffs: tuple[int, ...]
    ctx: ExtFieldCtx

    def _same(self, other: ExtFieldElement) -> None:
        if self.ctx != other.ctx:
            raise ContextMismatch("extension contexts differ")

    @property
    def q(self) -> int:
        return self.ctx.q

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def in_base_field(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_base(self) -> FieldElement:
        if not self.in_base_field():
            raise FieldError(f"{self.coeffs} does not lie in F_q")
        return FieldElement(self.coeffs[0], self.ctx.modulus)

    def __add__(self, other: ExtFieldElement) -> ExtFieldElement:
        self._same(other)
        q = self.q
        return ExtFieldElement(
            tuple((x + y) % q for x, y in zip(self.coeffs, other.coeffs)), self.ctx
        )

    def __sub__(self, other: ExtFieldElement) -> ExtFieldElement:
        self._same(other)
        q = self.q
        return ExtFieldElement(
            tuple((x - y) % q for x, y in zip(self.coeffs, other.coeffs)), self.ctx
        )

    def __neg__(self) -> ExtFieldElement:
        q = self.q
        return ExtFieldElement(tuple(-c % q for c in self.coeffs), self.ctx)

    def scale(self, k: FieldElement | int) -> ExtFieldElement:
        v = k.value if isinstance(k, FieldElement) else int(k) % self.q
        q = self.q
        return ExtFieldElement(tuple(c * v % q for c in self.coeffs), self.ctx)

    def __mul__(self, other: ExtFieldElement) -> ExtFieldElement:
        self._same(other)
        n, q, a = self.ctx.n, self.q, self.ctx.a.value
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(self.coeffs):
            if x == 0:
                continue
            for j, y in enumerate(other.coeffs):
                prod[i + j] += x * y
        # reduce y^n -> a
        for k in range(2 * n - 2, n - 1, -1):
            prod[k - n] += prod[k] * a
        return ExtFieldElement(tuple(c % q for c in prod[:n]), self.ctx)

    def __pow__(self, exponent: int) -> ExtFieldElement:
        if exponent < 0:
            return self.inv() ** (-exponent)
        result = self.ctx.one()
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inv(self) -> ExtFieldElement:
        if self.is_zero():
            raise DivisionByZero("zero is not invertible")
        return self ** (self.q**self.ctx.n - 2)


def trace(beta: ExtFieldElement) -> FieldElement:
    """The field trace Tr(beta) = sum of beta**(q**i) for i = 0..n-1.

    The Frobenius orbit sum always lands in F_q; a nonzero higher coordinate
    would indicate a broken context and raises.
    """
    ctx = beta.ctx
    acc = beta
    frob = beta
    for _ in range(ctx.n - 1):
        frob = frob ** ctx.q
        acc = acc + frob
    return acc.to_base()
