"""Exact arithmetic in Q(η), η a primitive p-th root of unity, and on P¹ over it.

An element is a rational coefficient vector of length p - 1 in the basis
1, η, ..., η^{p-2}; η^{p-1} is rewritten as -(1 + η + ... + η^{p-2}).
Points of P¹ are homogeneous pairs (z : w) with ∞ = (1 : 0), and Möbius
maps act by 2×2 matrices on them, so no case splits on poles are needed.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from .fp_linalg import require_prime

Rational = Union[int, Fraction]


class DegenerateInputError(ValueError):
    """Coincident points or a singular Möbius matrix."""
    pass


# ---------------------------------------------------------------------------
# Q(η)
# ---------------------------------------------------------------------------


def _reduce(p: int, raw: Iterable[Rational]) -> Tuple[Fraction, ...]:
    folded = [Fraction(0)] * p
    for k, c in enumerate(raw):
        folded[k % p] += Fraction(c)
    top = folded[p - 1]
    return tuple(folded[k] - top for k in range(p - 1))


@dataclass(frozen=True)
class CyclotomicNumber:
    p: int
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        require_prime(self.p)
        object.__setattr__(self, "coeffs", _reduce(self.p, self.coeffs))

    # --- constructors ---

    @classmethod
    def of(cls, p: int, value: Rational) -> "CyclotomicNumber":
        return cls(p, (Fraction(value),))

    @classmethod
    def zero(cls, p: int) -> "CyclotomicNumber":
        return cls(p, ())

    @classmethod
    def one(cls, p: int) -> "CyclotomicNumber":
        return cls.of(p, 1)

    @classmethod
    def eta(cls, p: int, k: int = 1) -> "CyclotomicNumber":
        """η^k for any integer k."""
        raw = [0] * p
        raw[k % p] = 1
        return cls(p, tuple(raw))

    # --- arithmetic ---

    def _coerce(self, other: Union["CyclotomicNumber", Rational]) -> "CyclotomicNumber":
        if isinstance(other, CyclotomicNumber):
            if other.p != self.p:
                raise ValueError(f"Q(ζ_{self.p}) vs Q(ζ_{other.p})")
            return other
        return CyclotomicNumber.of(self.p, other)

    def __add__(self, other: Union["CyclotomicNumber", Rational]) -> "CyclotomicNumber":
        o = self._coerce(other)
        return CyclotomicNumber(self.p, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "CyclotomicNumber":
        return CyclotomicNumber(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other: Union["CyclotomicNumber", Rational]) -> "CyclotomicNumber":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Rational) -> "CyclotomicNumber":
        return self._coerce(other) - self

    def __mul__(self, other: Union["CyclotomicNumber", Rational]) -> "CyclotomicNumber":
        o = self._coerce(other)
        raw = [Fraction(0)] * (2 * self.p)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                if b:
                    raw[i + j] += a * b
        return CyclotomicNumber(self.p, tuple(raw))

    __rmul__ = __mul__

    def conjugate(self, k: int) -> "CyclotomicNumber":
        """Image under the Galois automorphism η -> η^k, gcd(k, p) = 1."""
        if k % self.p == 0:
            raise ValueError(f"η -> η^{k} is not an automorphism of Q(ζ_{self.p})")
        raw = [Fraction(0)] * self.p
        for i, a in enumerate(self.coeffs):
            raw[(i * k) % self.p] += a
        return CyclotomicNumber(self.p, tuple(raw))

    def norm(self) -> Fraction:
        acc = self
        for k in range(2, self.p):
            acc = acc * self.conjugate(k)
        if not acc.is_rational():
            raise ArithmeticError(f"norm of {self} is not rational")
        return acc.coeffs[0]

    def inverse(self) -> "CyclotomicNumber":
        if self.is_zero():
            raise ZeroDivisionError("0 has no inverse in Q(η)")
        acc = CyclotomicNumber.one(self.p)
        for k in range(2, self.p):
            acc = acc * self.conjugate(k)
        return acc * (1 / (self * acc).coeffs[0])

    def __truediv__(self, other: Union["CyclotomicNumber", Rational]) -> "CyclotomicNumber":
        return self * self._coerce(other).inverse()

    def __pow__(self, k: int) -> "CyclotomicNumber":
        if k < 0:
            return self.inverse() ** (-k)
        result = CyclotomicNumber.one(self.p)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # --- queries ---

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_json(self) -> List[str]:
        return [str(c) for c in self.coeffs]

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("η" if k == 1 else f"η^{k}")
            if mono and c in (1, -1):
                coeff = "" if c == 1 else "-"
            else:
                coeff = str(c)
            terms.append(f"{coeff}{mono}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


# ---------------------------------------------------------------------------
# Polynomials in an indeterminate c over Q(η)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CPoly:
    p: int
    coeffs: Tuple[CyclotomicNumber, ...] = ()

    def __post_init__(self) -> None:
        cs = list(self.coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def constant(cls, value: CyclotomicNumber) -> "CPoly":
        return cls(value.p, (value,))

    @classmethod
    def c(cls, p: int) -> "CPoly":
        return cls(p, (CyclotomicNumber.zero(p), CyclotomicNumber.one(p)))

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> CyclotomicNumber:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else CyclotomicNumber.zero(self.p)

    def __add__(self, other: "CPoly") -> "CPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return CPoly(self.p, tuple(self.coefficient(k) + other.coefficient(k) for k in range(n)))

    def __neg__(self) -> "CPoly":
        return CPoly(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "CPoly") -> "CPoly":
        return self + (-other)

    def __mul__(self, other: "CPoly") -> "CPoly":
        if not self.coeffs or not other.coeffs:
            return CPoly(self.p)
        out = [CyclotomicNumber.zero(self.p)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return CPoly(self.p, tuple(out))

    def scale(self, k: CyclotomicNumber) -> "CPoly":
        return CPoly(self.p, tuple(a * k for a in self.coeffs))

    def evaluate(self, x: CyclotomicNumber) -> CyclotomicNumber:
        acc = CyclotomicNumber.zero(self.p)
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_json(self) -> List[List[str]]:
        return [a.to_json() for a in self.coeffs]


# ---------------------------------------------------------------------------
# P¹ and Möbius maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    z: CyclotomicNumber
    w: CyclotomicNumber

    def __post_init__(self) -> None:
        if self.z.is_zero() and self.w.is_zero():
            raise DegenerateInputError("(0 : 0) is not a point of P¹")

    @classmethod
    def of(cls, value: CyclotomicNumber) -> "ProjectivePoint":
        return cls(value, CyclotomicNumber.one(value.p))

    @property
    def p(self) -> int:
        return self.z.p

    def is_infinity(self) -> bool:
        return self.w.is_zero()

    def affine(self) -> CyclotomicNumber:
        if self.is_infinity():
            raise ZeroDivisionError("∞ has no affine coordinate")
        return self.z / self.w

    def normalized(self) -> Tuple[CyclotomicNumber, CyclotomicNumber]:
        if self.is_infinity():
            return CyclotomicNumber.one(self.p), CyclotomicNumber.zero(self.p)
        return self.affine(), CyclotomicNumber.one(self.p)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return (self.z * other.w - other.z * self.w).is_zero()

    def __hash__(self) -> int:
        return hash(self.normalized())

    def to_json(self) -> List[List[str]]:
        z, w = self.normalized()
        return [z.to_json(), w.to_json()]

    def __str__(self) -> str:
        return "∞" if self.is_infinity() else str(self.affine())


@dataclass(frozen=True)
class MoebiusMap:
    a: CyclotomicNumber
    b: CyclotomicNumber
    c: CyclotomicNumber
    d: CyclotomicNumber

    def __post_init__(self) -> None:
        if self.det().is_zero():
            raise DegenerateInputError("ad - bc = 0")

    @property
    def p(self) -> int:
        return self.a.p

    def det(self) -> CyclotomicNumber:
        return self.a * self.d - self.b * self.c

    @classmethod
    def identity(cls, p: int) -> "MoebiusMap":
        one, zero = CyclotomicNumber.one(p), CyclotomicNumber.zero(p)
        return cls(one, zero, zero, one)

    @classmethod
    def scaling(cls, factor: CyclotomicNumber) -> "MoebiusMap":
        """z -> factor · z."""
        one, zero = CyclotomicNumber.one(factor.p), CyclotomicNumber.zero(factor.p)
        return cls(factor, zero, zero, one)

    def __call__(self, pt: ProjectivePoint) -> ProjectivePoint:
        return ProjectivePoint(self.a * pt.z + self.b * pt.w, self.c * pt.z + self.d * pt.w)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        """``self @ other`` applies ``other`` first."""
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def adjugate(self) -> "MoebiusMap":
        """The inverse up to the scalar ad - bc."""
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def power(self, n: int) -> "MoebiusMap":
        if n < 0:
            return self.adjugate().power(-n)
        result = MoebiusMap.identity(self.p)
        for _ in range(n):
            result = self @ result
        return result

    def projectively_equal(self, other: "MoebiusMap") -> bool:
        m = self @ other.adjugate()
        return m.b.is_zero() and m.c.is_zero() and (m.a - m.d).is_zero()


def _line(pt: ProjectivePoint, at: ProjectivePoint) -> CyclotomicNumber:
    """L_pt(at) = z·w_pt - z_pt·w; zero iff ``at`` equals ``pt``."""
    return at.z * pt.w - pt.z * at.w


def _to_standard(pts: Sequence[ProjectivePoint]) -> MoebiusMap:
    """The map sending pts[0], pts[1], pts[2] to 0, 1, ∞."""
    p1, p2, p3 = pts
    if p1 == p2 or p2 == p3 or p1 == p3:
        raise DegenerateInputError("the three points must be pairwise distinct")
    s = _line(p3, p2)
    t = _line(p1, p2)
    return MoebiusMap(s * p1.w, -(s * p1.z), t * p3.w, -(t * p3.z))


def moebius_from_three(src: Sequence[ProjectivePoint], dst: Sequence[ProjectivePoint]) -> MoebiusMap:
    """The Möbius map with src[i] -> dst[i], unique up to scalar."""
    if len(src) != 3 or len(dst) != 3:
        raise DegenerateInputError("need exactly three source and three target points")
    return _to_standard(dst).adjugate() @ _to_standard(src)
