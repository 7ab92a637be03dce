"""Exact arithmetic in F_p and F_{p^t}, plus the field norm.

Elements are coefficient vectors (little-endian in the adjoined root), not
discrete logs; at the orders this package needs (a few hundred elements)
table-free arithmetic is simpler and cannot overflow.  The extension
modulus is always the lexicographically smallest monic irreducible
polynomial, coefficients compared low-degree first, so every downstream
matrix is bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import DimensionMismatchError, FieldOrderError, NotPrimeError

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 2^64."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _poly_rem(f: list[int], g: tuple[int, ...], p: int) -> list[int]:
    """Remainder of f modulo g over F_p.  Both little-endian, g monic."""
    r = list(f)
    dg = len(g) - 1
    for d in range(len(r) - 1, dg - 1, -1):
        c = r[d]
        if c:
            for k in range(dg):
                r[d - dg + k] = (r[d - dg + k] - c * g[k]) % p
            r[d] = 0
    del r[dg:]
    return r


def _is_irreducible(low: tuple[int, ...], p: int) -> bool:
    """Irreducibility of the monic polynomial x^t + sum(low[i] x^i) over F_p.

    Trial division by every monic polynomial of degree 1..t//2; fine for the
    tiny degrees this package uses.
    """
    t = len(low)
    f = list(low) + [1]
    for d in range(1, t // 2 + 1):
        for cs in product(range(p), repeat=d):
            g = cs + (1,)
            if not any(_poly_rem(f, g, p)):
                return False
    return True


def _smallest_irreducible(p: int, t: int) -> tuple[int, ...]:
    for low in product(range(p), repeat=t):
        if _is_irreducible(low, p):
            return low
    raise AssertionError(f"no irreducible degree-{t} polynomial over F_{p}")


@dataclass(frozen=True)
class FieldElement:
    """Element of a FiniteField as a coefficient tuple, low degree first."""

    field: "FiniteField"
    coeffs: tuple[int, ...]

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return self.field.add(self, other)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return self.field.sub(self, other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return self.field.mul(self, other)

    def __neg__(self) -> "FieldElement":
        return self.field.neg(self)

    def __pow__(self, e: int) -> "FieldElement":
        return self.field.pow(self, e)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __repr__(self) -> str:
        return f"FieldElement({self.coeffs!r} over GF({self.field.order}))"


class FiniteField:
    """F_{p^t} with a fixed canonical modulus.

    Immutable; all arithmetic methods are pure functions, so instances are
    safe to share across threads.
    """

    __slots__ = ("characteristic", "degree", "modulus", "order")

    def __init__(self, characteristic: int, degree: int = 1):
        if not is_prime(characteristic):
            raise NotPrimeError(f"characteristic {characteristic} is not prime")
        if degree < 1:
            raise ValueError("degree must be at least 1")
        order = characteristic**degree
        if order > 2**63:
            raise FieldOrderError(f"field order {characteristic}^{degree} exceeds 2^63")
        self.characteristic = characteristic
        self.degree = degree
        self.order = order
        self.modulus = () if degree == 1 else _smallest_irreducible(characteristic, degree)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteField)
            and self.characteristic == other.characteristic
            and self.degree == other.degree
        )

    def __hash__(self) -> int:
        return hash((self.characteristic, self.degree))

    def __repr__(self) -> str:
        if self.degree == 1:
            return f"FiniteField({self.characteristic})"
        return f"FiniteField({self.characteristic}, {self.degree})"

    def element(self, coeffs) -> FieldElement:
        """Build an element from an int (prime fields) or a coefficient sequence."""
        if isinstance(coeffs, int):
            if self.degree != 1:
                coeffs = (coeffs,) + (0,) * (self.degree - 1)
            else:
                coeffs = (coeffs,)
        cs = tuple(c % self.characteristic for c in coeffs)
        if len(cs) != self.degree:
            raise DimensionMismatchError(
                f"expected {self.degree} coefficients, got {len(cs)}"
            )
        return FieldElement(self, cs)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, (0,) * self.degree)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, (1,) + (0,) * (self.degree - 1))

    def _check(self, *els: FieldElement) -> None:
        for a in els:
            if a.field != self or len(a.coeffs) != self.degree:
                raise DimensionMismatchError("element does not belong to this field")

    def add(self, a: FieldElement, b: FieldElement) -> FieldElement:
        self._check(a, b)
        p = self.characteristic
        return FieldElement(self, tuple((x + y) % p for x, y in zip(a.coeffs, b.coeffs)))

    def sub(self, a: FieldElement, b: FieldElement) -> FieldElement:
        self._check(a, b)
        p = self.characteristic
        return FieldElement(self, tuple((x - y) % p for x, y in zip(a.coeffs, b.coeffs)))

    def neg(self, a: FieldElement) -> FieldElement:
        self._check(a)
        p = self.characteristic
        return FieldElement(self, tuple(-x % p for x in a.coeffs))

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        self._check(a, b)
        p, t = self.characteristic, self.degree
        if t == 1:
            return FieldElement(self, (a.coeffs[0] * b.coeffs[0] % p,))
        acc = [0] * (2 * t - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    acc[i + j] += x * y
        for d in range(2 * t - 2, t - 1, -1):
            c = acc[d] % p
            if c:
                for k in range(t):
                    acc[d - t + k] -= c * self.modulus[k]
        return FieldElement(self, tuple(c % p for c in acc[:t]))

    def pow(self, a: FieldElement, e: int) -> FieldElement:
        """a^e by square-and-multiply; a^0 = 1, including 0^0 = 1."""
        self._check(a)
        if e < 0:
            raise ValueError("exponent must be non-negative")
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def norm(self, z: FieldElement) -> FieldElement:
        """z^((q^t-1)/(q-1)), the multiplicative norm down to F_q.

        The result always lies in the base field; it is returned embedded in
        this field (coefficients above degree 0 are zero, asserted).
        """
        self._check(z)
        q = self.characteristic
        e = (self.order - 1) // (q - 1)
        r = self.pow(z, e)
        if any(r.coeffs[1:]):
            raise AssertionError("norm left the base field; modulus is corrupt")
        return r

    def elements(self):
        """All q^t elements in coefficient-lexicographic order (c0 varies slowest)."""
        for cs in product(range(self.characteristic), repeat=self.degree):
            yield FieldElement(self, cs)

    def index(self, a: FieldElement) -> int:
        """Rank of an element in the elements() enumeration."""
        self._check(a)
        v = 0
        for c in a.coeffs:
            v = v * self.characteristic + c
        return v

    def element_at(self, idx: int) -> FieldElement:
        """Inverse of index()."""
        if not 0 <= idx < self.order:
            raise ValueError(f"index {idx} out of range for field of order {self.order}")
        p = self.characteristic
        cs = []
        for _ in range(self.degree):
            cs.append(idx % p)
            idx //= p
        return FieldElement(self, tuple(reversed(cs)))


def make_field(p: int, t: int = 1) -> FiniteField:
    """Field of order p^t with the canonical (lex-smallest) modulus."""
    return FiniteField(p, t)
