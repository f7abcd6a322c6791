"""Moebius transformations on the projective line over GF(q).

An automorphism of the rational function field GF(q)(x) is determined by
x |-> (a x + b)/(c x + d) with ad - bc != 0, and this module keeps both
faces of that object straight:

  * point_action applies the matrix to a coordinate of the projective
    line (q finite points plus infinity);
  * place_action is the induced map on places, which is the coordinate
    action of the *adjugate* matrix: x - beta vanishes at beta, and its
    image under the substitution vanishes at (d*beta - b)/(-c*beta + a).

With these definitions the contract

    (sigma f) evaluated at sigma(P)  ==  f evaluated at P

holds exactly, where sigma f substitutes x |-> (ax+b)/(cx+d) into f.
Composition is automorphism composition (apply the right factor first);
in matrix terms that reverses the product, which only matters for the
non-abelian subgroups.

Matrices are canonicalized by scaling the first nonzero entry to 1, so
each group element has one representation and enumeration order is
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .field import FieldCtx, FieldElem, primitive_quadratic_check, primitive_quadratic_search
from .poly import Poly


@dataclass(frozen=True)
class ProjPoint:
    """A point of the projective line: a field element or infinity."""

    finite: Optional[FieldElem]

    @classmethod
    def of(cls, elem: FieldElem) -> ProjPoint:
        return cls(elem)

    @classmethod
    def infinity(cls) -> ProjPoint:
        return cls(None)

    @property
    def is_infinity(self) -> bool:
        return self.finite is None

    def sort_key(self) -> tuple[int, int]:
        return (1, 0) if self.finite is None else (0, self.finite.enc)

    def label(self) -> str:
        return "inf" if self.finite is None else f"{self.finite.enc}"

    def to_obj(self):
        return "inf" if self.finite is None else self.finite.enc

    @classmethod
    def from_obj(cls, field: FieldCtx, obj) -> ProjPoint:
        return cls(None) if obj == "inf" else cls(field.element(int(obj)))

    def __repr__(self) -> str:
        return f"P({self.label()})"


def all_points(field: FieldCtx) -> list[ProjPoint]:
    pts = [ProjPoint.of(e) for e in field.elements()]
    pts.append(ProjPoint.infinity())
    return pts


class Mobius:
    """One element of PGL_2(q) in canonical (first-nonzero-is-1) form."""

    __slots__ = ("field", "m")

    def __init__(self, field: FieldCtx, a: int, b: int, c: int, d: int):
        det = field.sub_enc(field.mul_enc(a, d), field.mul_enc(b, c))
        if det == 0:
            raise ValueError("singular matrix does not define a Moebius map")
        for e in (a, b, c, d):
            if e:
                inv = field.inv_enc(e)
                a, b, c, d = (field.mul_enc(inv, x) for x in (a, b, c, d))
                break
        self.field = field
        self.m = (a, b, c, d)

    @classmethod
    def from_elems(cls, a: FieldElem, b: FieldElem, c: FieldElem, d: FieldElem) -> Mobius:
        return cls(a.field, a.enc, b.enc, c.enc, d.enc)

    @classmethod
    def identity(cls, field: FieldCtx) -> Mobius:
        return cls(field, 1, 0, 0, 1)

    def is_identity(self) -> bool:
        return self.m == (1, 0, 0, 1)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Mobius) and self.field == other.field and self.m == other.m

    def __hash__(self) -> int:
        return hash((self.field.q, self.m))

    def sort_key(self) -> tuple[int, int, int, int]:
        return self.m

    def compose(self, other: Mobius) -> Mobius:
        """self after other: (self . other)(f) = self(other(f)).

        The function matrix of a composition is the reversed product:
        substituting sigma(x) into tau's expression applies tau's matrix
        to sigma's image.
        """
        f = self.field
        a2, b2, c2, d2 = other.m  # left factor of the matrix product
        a1, b1, c1, d1 = self.m
        return Mobius(
            f,
            f.add_enc(f.mul_enc(a2, a1), f.mul_enc(b2, c1)),
            f.add_enc(f.mul_enc(a2, b1), f.mul_enc(b2, d1)),
            f.add_enc(f.mul_enc(c2, a1), f.mul_enc(d2, c1)),
            f.add_enc(f.mul_enc(c2, b1), f.mul_enc(d2, d1)),
        )

    def inverse(self) -> Mobius:
        a, b, c, d = self.m
        f = self.field
        return Mobius(f, d, f.neg_enc(b), f.neg_enc(c), a)

    def power(self, e: int) -> Mobius:
        if e < 0:
            return self.inverse().power(-e)
        out = Mobius.identity(self.field)
        base = self
        while e:
            if e & 1:
                out = out.compose(base)
            base = base.compose(base)
            e >>= 1
        return out

    def order(self) -> int:
        k, cur = 1, self
        while not cur.is_identity():
            cur = cur.compose(self)
            k += 1
            if k > self.field.q ** 2:
                raise AssertionError("runaway order computation")
        return k

    def _coord(self, m: tuple[int, int, int, int], pt: ProjPoint) -> ProjPoint:
        a, b, c, d = m
        f = self.field
        if pt.is_infinity:
            if c == 0:
                return ProjPoint.infinity()
            return ProjPoint.of(f.element(f.mul_enc(a, f.inv_enc(c))))
        x = pt.finite.enc
        den = f.add_enc(f.mul_enc(c, x), d)
        num = f.add_enc(f.mul_enc(a, x), b)
        if den == 0:
            return ProjPoint.infinity()
        return ProjPoint.of(f.element(f.mul_enc(num, f.inv_enc(den))))

    def point_action(self, pt: ProjPoint) -> ProjPoint:
        """Coordinate action beta |-> (a beta + b)/(c beta + d)."""
        return self._coord(self.m, pt)

    def place_action(self, pt: ProjPoint) -> ProjPoint:
        """Image of the place at pt; adjugate coordinate action."""
        a, b, c, d = self.m
        f = self.field
        return self._coord((d, f.neg_enc(b), f.neg_enc(c), a), pt)

    def to_obj(self) -> list[int]:
        return list(self.m)

    def __repr__(self) -> str:
        a, b, c, d = self.m
        return f"Mobius([{a},{b};{c},{d}] over GF({self.field.q}))"


class GroupTable:
    """A finite subgroup of PGL_2(q), canonically enumerated, identity first."""

    def __init__(self, field: FieldCtx, elements: Iterable[Mobius], recipe: Optional[dict] = None):
        elems = list(elements)
        seen = {e.m for e in elems}
        if len(seen) != len(elems):
            raise ValueError("duplicate group elements")
        ident = Mobius.identity(field)
        if ident.m not in seen:
            raise ValueError("group table lacks the identity")
        rest = sorted((e for e in elems if not e.is_identity()), key=Mobius.sort_key)
        self.field = field
        self.elements: tuple[Mobius, ...] = tuple([ident] + rest)
        self.recipe = recipe
        index = {e.m: i for i, e in enumerate(self.elements)}
        for g in self.elements:
            if g.inverse().m not in index:
                raise ValueError("group table not closed under inverse")
            for h in self.elements:
                if g.compose(h).m not in index:
                    raise ValueError("group table not closed under composition")

    @classmethod
    def from_generators(cls, field: FieldCtx, gens: Sequence[Mobius],
                        recipe: Optional[dict] = None) -> GroupTable:
        frontier = [Mobius.identity(field)]
        seen = {frontier[0].m: frontier[0]}
        while frontier:
            cur = frontier.pop()
            for g in gens:
                for nxt in (cur.compose(g), g.compose(cur)):
                    if nxt.m not in seen:
                        seen[nxt.m] = nxt
                        frontier.append(nxt)
            if len(seen) > field.q ** 3:
                raise AssertionError("generator closure runaway")
        return cls(field, seen.values(), recipe=recipe)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, m: Mobius) -> bool:
        return any(e == m for e in self.elements)

    def is_subgroup(self, sub: GroupTable) -> bool:
        mine = {e.m for e in self.elements}
        return all(e.m in mine for e in sub.elements)

    def left_coset_reps(self, sub: GroupTable) -> list[Mobius]:
        """Canonical transversal of self/sub: identity's coset first, then
        minimal representative per coset in canonical element order."""
        if not self.is_subgroup(sub):
            raise ValueError("not a subgroup")
        seen: set = set()
        reps: list[Mobius] = []
        for g in self.elements:
            coset = frozenset(g.compose(h).m for h in sub.elements)
            if coset not in seen:
                seen.add(coset)
                reps.append(g)
        # canonical enumeration already puts the identity first
        return reps

    def to_obj(self) -> dict:
        if self.recipe is not None:
            return dict(self.recipe)
        return {"kind": "explicit", "elements": [e.to_obj() for e in self.elements]}

    def __repr__(self) -> str:
        return f"GroupTable(order {self.order} over GF({self.field.q}))"


# -- rational functions ------------------------------------------------------


class RationalFunction:
    """A reduced fraction num/den in GF(q)(x) with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num, den = Poly.zero(num.field), Poly.one(num.field)
        else:
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num // g, den // g
            lead_inv = den.leading().inverse()
            num, den = num.scale(lead_inv), den.scale(lead_inv)
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p: Poly) -> RationalFunction:
        return cls(p, Poly.one(p.field))

    @classmethod
    def x(cls, field: FieldCtx) -> RationalFunction:
        return cls(Poly.x(field), Poly.one(field))

    @classmethod
    def constant(cls, c: FieldElem) -> RationalFunction:
        return cls(Poly.constant(c), Poly.one(c.field))

    @property
    def field(self) -> FieldCtx:
        return self.num.field

    def is_zero(self) -> bool:
        return self.num.is_zero()

    @property
    def degree(self) -> int:
        """max(deg num, deg den): the degree as a map of the line."""
        return max(self.num.degree, self.den.degree)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, RationalFunction)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __add__(self, other: RationalFunction) -> RationalFunction:
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> RationalFunction:
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other: RationalFunction) -> RationalFunction:
        return self + (-other)

    def __mul__(self, other: RationalFunction) -> RationalFunction:
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: RationalFunction) -> RationalFunction:
        if other.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __pow__(self, e: int) -> RationalFunction:
        if e < 0:
            return (RationalFunction(self.den, self.num)) ** (-e)
        return RationalFunction(self.num ** e, self.den ** e)

    def substitute(self, m: Mobius) -> RationalFunction:
        """x |-> (a x + b)/(c x + d); clears denominators to reduced form."""
        f = self.field
        a, b, c, d = (f.element(e) for e in m.m)
        lin_num = Poly.from_elems(f, (b, a))
        lin_den = Poly.from_elems(f, (d, c))
        deg = max(self.num.degree, self.den.degree, 0)
        pow_num = [Poly.one(f)]
        pow_den = [Poly.one(f)]
        for _ in range(deg):
            pow_num.append(pow_num[-1] * lin_num)
            pow_den.append(pow_den[-1] * lin_den)

        def push(p: Poly) -> Poly:
            out = Poly.zero(f)
            for i in range(p.degree + 1):
                ci = p.coeff(i)
                if ci.enc:
                    out = out + (pow_num[i] * pow_den[deg - i]).scale(ci)
            return out

        return RationalFunction(push(self.num), push(self.den))

    def valuation(self, pt: ProjPoint) -> int:
        if self.is_zero():
            raise ValueError("valuation of the zero function")
        if pt.is_infinity:
            return self.den.degree - self.num.degree
        return self.num.root_multiplicity(pt.finite) - self.den.root_multiplicity(pt.finite)

    def eval_at(self, pt: ProjPoint, pole_budget: int = 0) -> FieldElem:
        """(pi^m f)(P) with pi = x - beta at finite beta and 1/x at infinity."""
        f = self.field
        if self.is_zero():
            return f.zero
        if pole_budget < 0:
            raise ValueError("pole budget must be >= 0")
        if pt.is_infinity:
            shift = self.num.degree - pole_budget - self.den.degree
            if shift > 0:
                raise ValueError(
                    f"pole of order {-self.valuation(pt)} at infinity exceeds budget {pole_budget}"
                )
            if shift < 0:
                return f.zero
            return self.num.leading() / self.den.leading()
        beta = pt.finite
        mn = self.num.root_multiplicity(beta)
        md = self.den.root_multiplicity(beta)
        net = mn + pole_budget - md
        if net < 0:
            raise ValueError(
                f"pole of order {md - mn} at {beta.enc} exceeds budget {pole_budget}"
            )
        if net > 0:
            return f.zero
        lin = Poly(f, (f.neg_enc(beta.enc), 1))
        nhat, dhat = self.num, self.den
        for _ in range(mn):
            nhat = nhat // lin
        for _ in range(md):
            dhat = dhat // lin
        return nhat.eval(beta) / dhat.eval(beta)

    def divisor_support(self) -> tuple[dict[ProjPoint, int], int]:
        """Valuations at every rational place, plus the degree residual
        carried by higher-degree places (so the principal divisor sums to 0)."""
        if self.is_zero():
            raise ValueError("divisor of the zero function")
        support: dict[ProjPoint, int] = {}
        total = 0
        for e in self.field.elements():
            v = self.num.root_multiplicity(e) - self.den.root_multiplicity(e)
            if v:
                support[ProjPoint.of(e)] = v
                total += v
        v_inf = self.den.degree - self.num.degree
        if v_inf:
            support[ProjPoint.infinity()] = v_inf
            total += v_inf
        return support, -total

    def to_obj(self) -> dict:
        return {"num": self.num.to_obj(), "den": self.den.to_obj()}

    def __repr__(self) -> str:
        return f"RationalFunction({list(self.num.coeffs)}/{list(self.den.coeffs)})"


def apply_to_function(sigma: Mobius, f: RationalFunction) -> RationalFunction:
    """The automorphism applied to a function: substitute x |-> sigma(x)."""
    return f.substitute(sigma)


# -- subgroup families -------------------------------------------------------


def subgroup_cyclic_qplus1(
    field: FieldCtx, quad: tuple[FieldElem, FieldElem], d: int
) -> GroupTable:
    """The order-d subgroup of the cyclic group induced by a primitive quadratic.

    x^2 + a x + b primitive makes eta(x) = 1/(-b x - a) an element of order
    q + 1 acting in a single cycle on all rational places; the order is
    re-verified by brute force before powering.
    """
    a, b = quad
    if not primitive_quadratic_check(a, b):
        raise ValueError("quadratic is not primitive")
    q = field.q
    if d < 1 or (q + 1) % d:
        raise ValueError(f"{d} does not divide q + 1 = {q + 1}")
    eta = Mobius(field, 0, 1, field.neg_enc(b.enc), field.neg_enc(a.enc))
    if eta.order() != q + 1:
        raise AssertionError("primitive quadratic did not induce an order q+1 map")
    gen = eta.power((q + 1) // d)
    table = GroupTable.from_generators(
        field, [gen],
        recipe={"kind": "cyclic_qplus1", "quad": [a.enc, b.enc], "d": d},
    )
    if table.order != d:
        raise AssertionError("cyclic subgroup has wrong order")
    return table


def multiplicative_subgroup(field: FieldCtx, u: int) -> list[FieldElem]:
    """The unique order-u subgroup of GF(q)*, ascending encodings."""
    if u < 1 or (field.q - 1) % u:
        raise ValueError(f"{u} does not divide q - 1 = {field.q - 1}")
    return [e for e in field.elements() if e.enc and e ** u == field.one]


def subfield_elements(field: FieldCtx, v: int) -> list[FieldElem]:
    """GF(p^v) inside GF(p^s): fixed points of the v-fold Frobenius."""
    if v < 1 or field.s % v:
        raise ValueError(f"GF({field.p}^{v}) is not a subfield of GF({field.q})")
    size = field.p ** v
    return [e for e in field.elements() if e ** size == e]


def subgroup_affine(
    field: FieldCtx, mult_part: Sequence[FieldElem], add_part: Sequence[FieldElem]
) -> GroupTable:
    """All maps x |-> a x + b with a in the multiplicative subgroup and b in
    the additive one; requires the additive part to be stable under the
    multiplicative part.  Fixes the infinite place."""
    h = {e.enc for e in mult_part}
    w = {e.enc for e in add_part}
    if 1 not in h or 0 in h:
        raise ValueError("multiplicative part must contain 1 and exclude 0")
    if 0 not in w:
        raise ValueError("additive part must contain 0")
    for x in h:
        for y in h:
            if field.mul_enc(x, y) not in h:
                raise ValueError("multiplicative part not closed")
        for y in w:
            if field.mul_enc(x, y) not in w:
                raise ValueError("additive part not stable under multipliers")
    for x in w:
        for y in w:
            if field.add_enc(x, y) not in w:
                raise ValueError("additive part not closed")
    elems = [Mobius(field, a, b, 0, 1) for a in sorted(h) for b in sorted(w)]
    return GroupTable(
        field, elems,
        recipe={"kind": "affine", "mult": sorted(h), "add": sorted(w)},
    )


def subgroup_dihedral(field: FieldCtx, u: int, variant: str) -> GroupTable:
    """Dihedral group of order 2u in even characteristic.

    q_plus (u | q+1) uses eta(x) = 1/(b x + a) from a primitive quadratic
    and tau(x) = 1/(b x); q_minus (u | q-1) uses x |-> c x with c of order
    u and tau(x) = 1/x.  The relation sigma tau sigma = tau is verified.
    """
    if field.p != 2:
        raise ValueError("dihedral construction requires even characteristic")
    q = field.q
    if variant == "q_plus":
        if u < 1 or (q + 1) % u:
            raise ValueError(f"{u} does not divide q + 1 = {q + 1}")
        a, b = primitive_quadratic_search(field)
        eta = Mobius(field, 0, 1, b.enc, a.enc)
        if eta.order() != q + 1:
            raise AssertionError("primitive quadratic did not induce an order q+1 map")
        sigma = eta.power((q + 1) // u)
        tau = Mobius(field, 0, 1, b.enc, 0)
    elif variant == "q_minus":
        if u < 1 or (q - 1) % u:
            raise ValueError(f"{u} does not divide q - 1 = {q - 1}")
        c = next(e for e in field.elements() if e.enc > 1 and e.multiplicative_order() == u) \
            if u > 1 else field.one
        sigma = Mobius(field, c.enc, 0, 0, 1)
        tau = Mobius(field, 0, 1, 1, 0)
    else:
        raise ValueError(f"unknown dihedral variant {variant!r}")
    if not sigma.compose(tau).compose(sigma) == tau:
        raise AssertionError("dihedral relation failed")
    table = GroupTable.from_generators(
        field, [sigma, tau], recipe={"kind": "dihedral", "u": u, "variant": variant}
    )
    if table.order != 2 * u:
        raise AssertionError(f"dihedral table has order {table.order}, wanted {2 * u}")
    return table


def cyclic_subgroup_of_order(group: GroupTable, m: int) -> GroupTable:
    """Subgroup generated by the first canonical element of order m."""
    for e in group.elements:
        if e.order() == m:
            return GroupTable.from_generators(group.field, [e])
    raise ValueError(f"group has no element of order {m}")


def build_group(field: FieldCtx, obj: dict) -> GroupTable:
    """Rebuild a subgroup from its serialized spec."""
    kind = obj["kind"]
    if kind == "cyclic_qplus1":
        quad = (field.element(obj["quad"][0]), field.element(obj["quad"][1]))
        return subgroup_cyclic_qplus1(field, quad, obj["d"])
    if kind == "affine":
        return subgroup_affine(
            field,
            [field.element(e) for e in obj["mult"]],
            [field.element(e) for e in obj["add"]],
        )
    if kind == "dihedral":
        return subgroup_dihedral(field, obj["u"], obj["variant"])
    if kind == "explicit":
        return GroupTable(field, [Mobius(field, *row) for row in obj["elements"]])
    raise ValueError(f"unknown group kind {kind!r}")


# -- orbit structure ---------------------------------------------------------


@dataclass(frozen=True)
class SplitStructure:
    """Partition of the q+1 rational points into free orbits and the rest.

    Free orbits have size exactly |G| (the place below splits completely)
    and are ordered so that member j is element j of the canonical group
    enumeration applied to the minimal representative.
    """

    free_orbits: tuple[tuple[ProjPoint, ...], ...]
    ramified: tuple[ProjPoint, ...]


def split_structure(group: GroupTable) -> SplitStructure:
    field = group.field
    remaining = {pt.sort_key(): pt for pt in all_points(field)}
    free: list[tuple[ProjPoint, ...]] = []
    ramified: list[ProjPoint] = []
    while remaining:
        rep = remaining.pop(min(remaining))
        images = [g.place_action(rep) for g in group.elements]
        orbit = {pt.sort_key(): pt for pt in images}
        for key in orbit:
            remaining.pop(key, None)
        if len(orbit) == group.order:
            free.append(tuple(images))
        else:
            ramified.extend(orbit.values())
    ramified.sort(key=ProjPoint.sort_key)
    if len(ramified) > max(2 * group.order - 2, 0):
        raise AssertionError(
            f"{len(ramified)} ramified points exceed the Hurwitz cap {2 * group.order - 2}"
        )
    free.sort(key=lambda orbit: orbit[0].sort_key())
    return SplitStructure(tuple(free), tuple(ramified))


def fixed_field_generator(group: GroupTable) -> RationalFunction:
    """A degree-|H| rational function fixed by every element of the group.

    Candidates are tried in a fixed order — power sums of sigma(x) for
    exponents 1, 2, 3, then the orbit product — and the first one whose
    degree equals |H| wins, so regenerated constructions are identical.
    """
    field = group.field
    x = RationalFunction.x(field)
    images = [apply_to_function(g, x) for g in group.elements]
    candidates = []
    for power in (1, 2, 3):
        acc = RationalFunction.constant(field.zero)
        for img in images:
            acc = acc + img ** power
        candidates.append(acc)
    prod = RationalFunction.constant(field.one)
    for img in images:
        prod = prod * img
    candidates.append(prod)
    for z in candidates:
        if not z.is_zero() and z.degree == group.order:
            for g in group.elements:
                if apply_to_function(g, z) != z:
                    raise AssertionError("candidate generator is not invariant")
            return z
    raise AssertionError("no fixed-field generator found among candidates")
