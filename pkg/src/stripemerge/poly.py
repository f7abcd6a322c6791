"""Dense univariate polynomials over a FieldCtx.

Coefficients are stored constant-first as integer encodings with no
trailing zeros; the zero polynomial has an empty coefficient tuple and
degree -1.  This is shared plumbing for the evaluation-code and
function-field modules; nothing here is performance critical.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .field import FieldCtx, FieldElem


class Poly:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldCtx, coeffs: Sequence[int] = ()):
        cs = list(int(c) for c in coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def from_elems(cls, field: FieldCtx, elems: Iterable[FieldElem]) -> Poly:
        return cls(field, [e.enc for e in elems])

    @classmethod
    def zero(cls, field: FieldCtx) -> Poly:
        return cls(field, ())

    @classmethod
    def one(cls, field: FieldCtx) -> Poly:
        return cls(field, (1,))

    @classmethod
    def x(cls, field: FieldCtx) -> Poly:
        return cls(field, (0, 1))

    @classmethod
    def constant(cls, c: FieldElem) -> Poly:
        return cls(c.field, (c.enc,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> FieldElem:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.field.element(self.coeffs[-1])

    def coeff(self, i: int) -> FieldElem:
        enc = self.coeffs[i] if 0 <= i < len(self.coeffs) else 0
        return self.field.element(enc)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Poly)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.field.q, self.coeffs))

    def __add__(self, other: Poly) -> Poly:
        f = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        out = [0] * n
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else 0
            b = other.coeffs[i] if i < len(other.coeffs) else 0
            out[i] = f.add_enc(a, b)
        return Poly(f, out)

    def __neg__(self) -> Poly:
        f = self.field
        return Poly(f, [f.neg_enc(c) for c in self.coeffs])

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        f = self.field
        if self.is_zero() or other.is_zero():
            return Poly.zero(f)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = f.add_enc(out[i + j], f.mul_enc(a, b))
        return Poly(f, out)

    def scale(self, c: FieldElem) -> Poly:
        f = self.field
        return Poly(f, [f.mul_enc(c.enc, a) for a in self.coeffs])

    def __pow__(self, e: int) -> Poly:
        if e < 0:
            raise ValueError("negative polynomial power")
        result = Poly.one(self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        f = self.field
        rem = list(self.coeffs)
        dd = other.degree
        quot = [0] * max(len(rem) - dd, 0)
        inv_lead = f.inv_enc(other.coeffs[-1])
        while len(rem) - 1 >= dd and rem:
            shift = len(rem) - 1 - dd
            factor = f.mul_enc(rem[-1], inv_lead)
            quot[shift] = factor
            for i, c in enumerate(other.coeffs):
                rem[shift + i] = f.sub_enc(rem[shift + i], f.mul_enc(factor, c))
            while rem and rem[-1] == 0:
                rem.pop()
        return Poly(f, quot), Poly(f, rem)

    def __mod__(self, other: Poly) -> Poly:
        return self.divmod(other)[1]

    def __floordiv__(self, other: Poly) -> Poly:
        return self.divmod(other)[0]

    def gcd(self, other: Poly) -> Poly:
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def monic(self) -> Poly:
        if self.is_zero():
            raise ValueError("zero polynomial cannot be made monic")
        return self.scale(self.field.element(self.field.inv_enc(self.coeffs[-1])))

    def eval(self, x: FieldElem) -> FieldElem:
        f = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = f.add_enc(f.mul_enc(acc, x.enc), c)
        return f.element(acc)

    def root_multiplicity(self, x: FieldElem) -> int:
        """Multiplicity of x as a root (0 if not a root)."""
        if self.is_zero():
            raise ValueError("zero polynomial")
        lin = Poly(self.field, (self.field.neg_enc(x.enc), 1))
        m, rest = 0, self
        while True:
            q, r = rest.divmod(lin)
            if not r.is_zero():
                return m
            m, rest = m + 1, q

    def to_obj(self) -> list[int]:
        return list(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)} over GF({self.field.q}))"


def poly_from_roots(field: FieldCtx, roots: Iterable[FieldElem]) -> Poly:
    """Monic product of (x - r) over the given roots."""
    out = Poly.one(field)
    for r in roots:
        out = out * Poly(field, (field.neg_enc(r.enc), 1))
    return out
