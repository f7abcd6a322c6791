"""Exact arithmetic in small finite fields GF(p^s).

Elements are stored as integer encodings: the polynomial-basis coefficient
vector (c_0, ..., c_{s-1}) with c_i in [0, p) packs little-endian as
c_0 + c_1*p + ... + c_{s-1}*p^(s-1).  For prime fields (s = 1) the encoding
is the residue itself.

Extension-field multiplication goes through exp/log tables built once per
context from a multiplicative generator; addition stays coefficient-wise
(XOR in characteristic 2).  Fields are capped at q <= 2^16, which keeps
every table small and every scan exhaustive.

A FieldCtx is immutable after construction and safe to share between
threads.  Elements of different contexts never mix: any cross-field
operation raises ValueError instead of coercing.
"""

from __future__ import annotations

from typing import Iterator, Optional, Sequence

MAX_Q = 1 << 16


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def _factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (n <= 2^32 here)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# -- dense polynomials over GF(p), used only for modulus handling -----------
# Coefficient lists are constant-first with no trailing zeros.


def _pnorm(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pnorm(out)


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        shift = len(a) - 1 - dm
        factor = (a[-1] * inv_lead) % p
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * mi) % p
        _pnorm(a)
    return a


def _poly_irreducible(m: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg(m)/2."""
    m = _pnorm(list(m))
    deg = len(m) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for enc in range(p ** d):
            div = [(enc // p ** i) % p for i in range(d)] + [1]
            if not _pmod(m, div, p):
                return False
    return True


def _first_irreducible(p: int, s: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible of degree s.

    The scan runs over the packed encoding c_0 + c_1 p + ... ascending, so
    two runs (or two implementations) agree on the default modulus.
    """
    for enc in range(p ** s):
        cand = [(enc // p ** i) % p for i in range(s)] + [1]
        if _poly_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # unreachable


class FieldCtx:
    """The field GF(p^s) with a fixed monic irreducible modulus."""

    def __init__(self, p: int, s: int, modulus: Optional[Sequence[int]] = None):
        if not _is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if s < 1:
            raise ValueError(f"extension degree must be >= 1, got {s}")
        q = p ** s
        if q > MAX_Q:
            raise ValueError(f"field size {q} exceeds supported maximum {MAX_Q}")
        self.p = p
        self.s = s
        self.q = q
        if s == 1:
            self.modulus = (0, 1)  # unused; kept for uniform serialization
        elif modulus is None:
            self.modulus = _first_irreducible(p, s)
        else:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != s + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree s")
            if not _poly_irreducible(modulus, p):
                raise ValueError(f"modulus {list(modulus)} is reducible over GF({p})")
            self.modulus = modulus
        self._exp: list[int] = []
        self._log: list[int] = []
        if s > 1:
            self._build_tables()

    # -- low-level ops on integer encodings ---------------------------------

    def _raw_mul(self, a: int, b: int) -> int:
        """Schoolbook product mod the modulus, no tables."""
        p, s = self.p, self.s
        ac = [(a // p ** i) % p for i in range(s)]
        bc = [(b // p ** i) % p for i in range(s)]
        prod = [0] * (2 * s - 1)
        for i, ai in enumerate(ac):
            if ai:
                for j, bj in enumerate(bc):
                    prod[i + j] = (prod[i + j] + ai * bj) % p
        red = _pmod(prod, list(self.modulus), p)
        red += [0] * (s - len(red))
        enc = 0
        for i in range(s - 1, -1, -1):
            enc = enc * p + red[i]
        return enc

    def _build_tables(self) -> None:
        q = self.q
        order_factors = _factorize(q - 1)
        gen = 0
        for cand in range(2, q):
            if all(self._raw_pow(cand, (q - 1) // f) != 1 for f in order_factors):
                gen = cand
                break
        exp = [1] * (q - 1)
        for i in range(1, q - 1):
            exp[i] = self._raw_mul(exp[i - 1], gen)
        log = [0] * q
        for i, v in enumerate(exp):
            log[v] = i
        self._exp, self._log = exp, log

    def _raw_pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._raw_mul(r, a)
            a = self._raw_mul(a, a)
            e >>= 1
        return r

    def add_enc(self, a: int, b: int) -> int:
        p = self.p
        if self.s == 1:
            return (a + b) % p
        if p == 2:
            return a ^ b
        out, mult = 0, 1
        for _ in range(self.s):
            out += ((a % p + b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg_enc(self, a: int) -> int:
        p = self.p
        if self.s == 1:
            return (-a) % p
        if p == 2:
            return a
        out, mult = 0, 1
        for _ in range(self.s):
            out += ((-a) % p) * mult
            a //= p
            mult *= p
        return out

    def sub_enc(self, a: int, b: int) -> int:
        return self.add_enc(a, self.neg_enc(b))

    def mul_enc(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.s == 1:
            return (a * b) % self.p
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv_enc(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero field element")
        if self.s == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def pow_enc(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow_enc(self.inv_enc(a), -e)
        if a == 0:
            return 0 if e else 1
        if self.s == 1:
            return pow(a, e, self.p)
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    # -- element factory -----------------------------------------------------

    def element(self, enc: int) -> FieldElem:
        enc = int(enc)
        if not 0 <= enc < self.q:
            raise ValueError(f"encoding {enc} out of range for GF({self.q})")
        return FieldElem(self, enc)

    def from_coeffs(self, coeffs: Sequence[int]) -> FieldElem:
        if len(coeffs) > self.s:
            raise ValueError("too many coefficients")
        enc = 0
        for i, c in enumerate(coeffs):
            enc += (int(c) % self.p) * self.p ** i
        return FieldElem(self, enc)

    @property
    def zero(self) -> FieldElem:
        return FieldElem(self, 0)

    @property
    def one(self) -> FieldElem:
        return FieldElem(self, 1)

    def elements(self) -> Iterator[FieldElem]:
        for enc in range(self.q):
            yield FieldElem(self, enc)

    # -- identity / serialization -------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldCtx)
            and (self.p, self.s, self.modulus) == (other.p, other.s, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.s, self.modulus))

    def __repr__(self) -> str:
        return f"FieldCtx(GF({self.q}))" if self.s > 1 else f"FieldCtx(GF({self.p}))"

    def to_obj(self) -> dict:
        return {"p": self.p, "s": self.s, "modulus": list(self.modulus)}

    @classmethod
    def from_obj(cls, obj: dict) -> FieldCtx:
        return cls(obj["p"], obj["s"], obj.get("modulus") if obj["s"] > 1 else None)


class FieldElem:
    """An element of a FieldCtx; immutable value type."""

    __slots__ = ("field", "enc")

    def __init__(self, field: FieldCtx, enc: int):
        self.field = field
        self.enc = enc

    def _check(self, other: FieldElem) -> None:
        if not isinstance(other, FieldElem):
            raise TypeError(f"expected FieldElem, got {type(other).__name__}")
        if other.field != self.field:
            raise ValueError("operands belong to different fields")

    def __add__(self, other: FieldElem) -> FieldElem:
        self._check(other)
        return FieldElem(self.field, self.field.add_enc(self.enc, other.enc))

    def __sub__(self, other: FieldElem) -> FieldElem:
        self._check(other)
        return FieldElem(self.field, self.field.sub_enc(self.enc, other.enc))

    def __mul__(self, other: FieldElem) -> FieldElem:
        self._check(other)
        return FieldElem(self.field, self.field.mul_enc(self.enc, other.enc))

    def __truediv__(self, other: FieldElem) -> FieldElem:
        self._check(other)
        return FieldElem(
            self.field, self.field.mul_enc(self.enc, self.field.inv_enc(other.enc))
        )

    def __pow__(self, e: int) -> FieldElem:
        return FieldElem(self.field, self.field.pow_enc(self.enc, int(e)))

    def __neg__(self) -> FieldElem:
        return FieldElem(self.field, self.field.neg_enc(self.enc))

    def inverse(self) -> FieldElem:
        return FieldElem(self.field, self.field.inv_enc(self.enc))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldElem)
            and self.field == other.field
            and self.enc == other.enc
        )

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.s, self.enc))

    def __bool__(self) -> bool:
        return self.enc != 0

    @property
    def coeffs(self) -> tuple[int, ...]:
        p, e = self.field.p, self.enc
        out = []
        for _ in range(self.field.s):
            out.append(e % p)
            e //= p
        return tuple(out)

    def multiplicative_order(self) -> int:
        """Least e >= 1 with self^e = 1; divides q - 1."""
        if self.enc == 0:
            raise ZeroDivisionError("zero has no multiplicative order")
        order = self.field.q - 1
        for prime in _factorize(order):
            while order % prime == 0 and self.field.pow_enc(self.enc, order // prime) == 1:
                order //= prime
        return order

    def __repr__(self) -> str:
        return f"<{self.enc} in GF({self.field.q})>"


def field_create(p: int, s: int, modulus: Optional[Sequence[int]] = None) -> FieldCtx:
    """Build GF(p^s); scans for the first irreducible modulus when omitted."""
    return FieldCtx(p, s, modulus)


# -- primitive quadratics ----------------------------------------------------
#
# The quadratic extension GF(q)[x]/(x^2 + a x + b) is modelled directly on
# coefficient pairs (u, v) = u + v*X, so no tower of FieldCtx objects is
# needed.  x^2 + a x + b is primitive iff it is irreducible and the class of
# X has multiplicative order q^2 - 1.


def _quad_mul(x, y, a: FieldElem, b: FieldElem):
    u1, v1 = x
    u2, v2 = y
    vv = v1 * v2
    return (u1 * u2 - b * vv, u1 * v2 + u2 * v1 - a * vv)


def _quad_pow(x, e: int, a: FieldElem, b: FieldElem, field: FieldCtx):
    result = (field.one, field.zero)
    while e:
        if e & 1:
            result = _quad_mul(result, x, a, b)
        x = _quad_mul(x, x, a, b)
        e >>= 1
    return result


def primitive_quadratic_check(a: FieldElem, b: FieldElem) -> bool:
    """True iff x^2 + a x + b is irreducible over GF(q) with root of order q^2 - 1."""
    field = a.field
    a._check(b)
    for beta in field.elements():
        if beta * beta + a * beta + b == field.zero:
            return False
    root = (field.zero, field.one)
    one = (field.one, field.zero)
    order = field.q ** 2 - 1
    for prime in _factorize(order):
        if _quad_pow(root, order // prime, a, b, field) == one:
            return False
    return True


def primitive_quadratic_search(field: FieldCtx) -> tuple[FieldElem, FieldElem]:
    """First (a, b) in ascending-encoding scan with x^2 + a x + b primitive."""
    for a_enc in range(field.q):
        a = field.element(a_enc)
        for b_enc in range(field.q):
            b = field.element(b_enc)
            if primitive_quadratic_check(a, b):
                return (a, b)
    raise AssertionError("no primitive quadratic exists")  # unreachable for q >= 2
