"""Ideal-theoretic engine: Groebner bases with cofactor tracking, normal forms,
membership certificates, variable elimination and saturation.

Buchberger with the normal selection strategy and both standard criteria.  The
replayed systems are small, so simplicity and determinism win over asymptotics;
for weighted-homogeneous generator sets an optional degree bound truncates the
pair queue (a valid d-Groebner basis, sufficient to decide membership of
targets up to that weighted degree).

Every returned Certificate's identity

    multiplier**power * target  ==  sum(cofactor_i * generator_i)

is re-checked exactly on construction, so a Certificate object in hand is
proof.  Cofactors are tracked through basis construction and normal form, so
certificates always refer back to the caller's generators.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

from .exactpoly import (
    MonomialOrder,
    PolyError,
    Polynomial,
    VarTable,
    block_order,
    grevlex_order,
)


class ResourceExhausted(Exception):
    """A configured basis-size or pair-count ceiling was hit; names the stage."""

    def __init__(self, what: str, limit: int, context: str = ""):
        msg = f"resource ceiling exceeded: {what} > {limit}"
        if context:
            msg += f" [{context}]"
        super().__init__(msg)
        self.what = what
        self.limit = limit
        self.context = context


@dataclass(frozen=True)
class Limits:
    max_basis: int = 4000
    max_pairs: int = 200000
    context: str = ""

    def named(self, context: str) -> "Limits":
        return Limits(self.max_basis, self.max_pairs, context)


@dataclass
class Relation:
    """A polynomial asserted to vanish, with a stable identifier."""

    rid: str
    poly: Polynomial

    def __post_init__(self):
        if self.poly.is_zero():
            raise PolyError(f"relation {self.rid!r} is the zero polynomial")


class GeneratorSet:
    """Ordered set of relations with unique ids over one table."""

    def __init__(self, table: VarTable, relations: Iterable[Relation] = ()):
        self.table = table
        self.relations: List[Relation] = []
        self._by_id: Dict[str, Relation] = {}
        for r in relations:
            self.add(r)

    def add(self, rel: Relation) -> None:
        if rel.rid in self._by_id:
            raise PolyError(f"duplicate relation id {rel.rid!r}")
        if rel.poly.table != self.table:
            raise PolyError("relation table mismatch")
        self.relations.append(rel)
        self._by_id[rel.rid] = rel

    def __len__(self) -> int:
        return len(self.relations)

    def __iter__(self):
        return iter(self.relations)

    def __contains__(self, rid: str) -> bool:
        return rid in self._by_id

    def get(self, rid: str) -> Relation:
        return self._by_id[rid]

    def ids(self) -> List[str]:
        return [r.rid for r in self.relations]

    def subset(self, rids: Sequence[str]) -> "GeneratorSet":
        return GeneratorSet(self.table, [self.get(r) for r in rids])


@dataclass(frozen=True)
class SaturationRecord:
    """A multiplier the pipeline may divide by, with its justification."""

    sid: str
    multiplier: Polynomial
    justification: str

    def __post_init__(self):
        if self.multiplier.is_zero():
            raise PolyError(f"saturation multiplier {self.sid!r} is zero")


class Certificate:
    """Exact witness that multiplier**power * target lies in an ideal.

    ``pairs`` maps generator id -> cofactor polynomial.  Construction verifies
    the defining identity term-by-term and refuses invalid certificates.
    """

    def __init__(
        self,
        target: Polynomial,
        pairs: Dict[str, Polynomial],
        gens: GeneratorSet,
        multiplier: Optional[Polynomial] = None,
        power: int = 0,
        target_id: str = "",
    ):
        self.target = target
        self.pairs = {k: v for k, v in pairs.items() if not v.is_zero()}
        self.multiplier = multiplier if power else None
        self.power = power if multiplier is not None else 0
        self.target_id = target_id
        self._gen_polys = {rid: gens.get(rid).poly for rid in self.pairs}
        lhs = target * (self.multiplier ** self.power) if self.power else target
        rhs = Polynomial.zero(target.table)
        for rid in sorted(self.pairs):
            rhs = rhs + self.pairs[rid] * self._gen_polys[rid]
        if lhs != rhs:
            raise PolyError("certificate identity does not hold")

    def generator_poly(self, rid: str) -> Polynomial:
        return self._gen_polys[rid]

    def used_generators(self) -> List[str]:
        return sorted(self.pairs)

    def identity_text(self) -> str:
        parts = [f"target := {self.target.to_text()}"]
        if self.power:
            parts.append(f"multiplier := {self.multiplier.to_text()} power := {self.power}")
        for rid in self.used_generators():
            parts.append(f"cofactor[{rid}] := {self.pairs[rid].to_text()}")
            parts.append(f"generator[{rid}] := {self._gen_polys[rid].to_text()}")
        return "\n".join(parts)

    def digest(self) -> str:
        return hashlib.sha256(self.identity_text().encode()).hexdigest()


NOT_MEMBER = "not-member"


class GroebnerBasis:
    """Reduced (possibly degree-truncated) Groebner basis with provenance:
    ``reps[i]`` expresses ``polys[i]`` as a combination of the generators."""

    def __init__(self, gens: GeneratorSet, order: MonomialOrder,
                 polys: List[Polynomial], reps: List[Dict[str, Polynomial]],
                 degree_bound: Optional[int] = None):
        self.gens = gens
        self.order = order
        self.polys = polys
        self.reps = reps
        self.degree_bound = degree_bound

    def __len__(self) -> int:
        return len(self.polys)

    def contains_one(self) -> bool:
        return any(not p.is_zero() and p.total_degree() == 0 for p in self.polys)

    def printed(self) -> List[str]:
        return [p.to_text(self.order) for p in self.polys]


# -- representation helpers ---------------------------------------------------

def _rep_addmul(acc: Dict[str, Polynomial], rep: Dict[str, Polynomial],
                factor: Optional[Polynomial] = None) -> None:
    for k, v in rep.items():
        vv = v * factor if factor is not None else v
        if vv.is_zero():
            continue
        if k in acc:
            s = acc[k] + vv
            if s.is_zero():
                del acc[k]
            else:
                acc[k] = s
        else:
            acc[k] = vv


def _rep_scaled(rep: Dict[str, Polynomial], factor) -> Dict[str, Polynomial]:
    out: Dict[str, Polynomial] = {}
    for k, v in rep.items():
        vv = v * factor
        if not vv.is_zero():
            out[k] = vv
    return out


def _mono_div(a: tuple, b: tuple) -> Optional[tuple]:
    q = tuple(x - y for x, y in zip(a, b))
    if any(e < 0 for e in q):
        return None
    return q


def _mono_lcm(a: tuple, b: tuple) -> tuple:
    return tuple(max(x, y) for x, y in zip(a, b))


def _wdeg(table: VarTable, mono: tuple) -> int:
    return sum(e * w for e, w in zip(mono, table.weights))


def _reduce(p: Polynomial, basis: List[Polynomial], order: MonomialOrder):
    """Full division: p == remainder + sum(factors[i] * basis[i]), with no
    remainder term divisible by any basis leading term."""
    table = p.table
    lts = [b.leading_term(order) for b in basis]
    factors: List[Polynomial] = [Polynomial.zero(table) for _ in basis]
    remainder = Polynomial.zero(table)
    work = p
    while work.terms:
        m, c = work.leading_term(order)
        hit = -1
        for i, (lm, _) in enumerate(lts):
            if _mono_div(m, lm) is not None:
                hit = i
                break
        if hit < 0:
            t = Polynomial(table, {m: c})
            remainder = remainder + t
            work = work - t
            continue
        lm, lc = lts[hit]
        f = Polynomial(table, {_mono_div(m, lm): Fraction(c) / Fraction(lc)})
        work = work - f * basis[hit]
        factors[hit] = factors[hit] + f
    return remainder, factors


def _compose(factors: List[Polynomial], reps: List[Dict[str, Polynomial]]) -> Dict[str, Polynomial]:
    out: Dict[str, Polynomial] = {}
    for f, rep in zip(factors, reps):
        if f.is_zero():
            continue
        _rep_addmul(out, rep, f)
    return out


def _rep_check(p: Polynomial, rep: Dict[str, Polynomial], gens: GeneratorSet) -> None:
    acc = Polynomial.zero(p.table)
    for rid in sorted(rep):
        acc = acc + rep[rid] * gens.get(rid).poly
    if acc != p:
        raise PolyError("internal error: generator provenance lost")


def groebner(gens: GeneratorSet, order: Optional[MonomialOrder] = None,
             limits: Limits = Limits(), degree_bound: Optional[int] = None) -> GroebnerBasis:
    """Reduced Groebner basis (Buchberger, normal selection, both criteria),
    deterministic for fixed input and order.

    ``degree_bound`` (weighted degree): honored only when every generator is
    weighted-homogeneous; pairs above the bound are discarded, yielding a
    truncated basis valid for membership up to the bound.
    """
    if len(gens) == 0:
        raise PolyError("empty generator set")
    order = order or grevlex_order()
    table = gens.table
    if degree_bound is not None and not all(r.poly.is_weighted_homogeneous() for r in gens):
        degree_bound = None

    basis: List[Polynomial] = []
    reps: List[Dict[str, Polynomial]] = []

    def normalized(p: Polynomial, rep: Dict[str, Polynomial]):
        scale = Fraction(1) / p.content()
        if p.leading_term(order)[1] < 0:
            scale = -scale
        return p * scale, _rep_scaled(rep, scale)

    pairs = set()

    def push(p: Polynomial, rep: Dict[str, Polynomial]) -> None:
        p, rep = normalized(p, rep)
        basis.append(p)
        reps.append(rep)
        new = len(basis) - 1
        for k in range(new):
            pairs.add((k, new))
        if len(basis) > limits.max_basis:
            raise ResourceExhausted("basis size", limits.max_basis, limits.context)

    for r in gens:
        red, fac = _reduce(r.poly, basis, order)
        if red.is_zero():
            continue
        rep = {r.rid: Polynomial.const(table, 1)}
        _rep_addmul(rep, _compose(fac, reps), Polynomial.const(table, -1))
        push(red, rep)

    processed = 0
    while pairs:
        processed += 1
        if processed > limits.max_pairs:
            raise ResourceExhausted("pair count", limits.max_pairs, limits.context)
        lts = [b.leading_term(order)[0] for b in basis]
        i, j = min(pairs, key=lambda ij: (order.key(_mono_lcm(lts[ij[0]], lts[ij[1]])), ij))
        pairs.discard((i, j))
        lmi, lci = basis[i].leading_term(order)
        lmj, lcj = basis[j].leading_term(order)
        lcm = _mono_lcm(lmi, lmj)
        if degree_bound is not None and _wdeg(table, lcm) > degree_bound:
            continue
        if lcm == tuple(a + b for a, b in zip(lmi, lmj)):
            continue  # coprime leading monomials: S-poly reduces to zero
        chain = False
        for k in range(len(basis)):
            if k in (i, j) or _mono_div(lcm, lts[k]) is None:
                continue
            if (min(i, k), max(i, k)) not in pairs and (min(j, k), max(j, k)) not in pairs:
                chain = True
                break
        if chain:
            continue
        fi = Polynomial(table, {_mono_div(lcm, lmi): Fraction(1) / Fraction(lci)})
        fj = Polynomial(table, {_mono_div(lcm, lmj): Fraction(1) / Fraction(lcj)})
        s = fi * basis[i] - fj * basis[j]
        if s.is_zero():
            continue
        rep_s = _rep_scaled(reps[i], fi)
        _rep_addmul(rep_s, reps[j], -fj)
        red, fac = _reduce(s, basis, order)
        if red.is_zero():
            continue
        _rep_addmul(rep_s, _compose(fac, reps), Polynomial.const(table, -1))
        push(red, rep_s)

    # minimalize: drop elements whose leading term another's divides
    lts = [b.leading_term(order)[0] for b in basis]
    drop = set()
    for i in range(len(basis)):
        for j in range(len(basis)):
            if i == j or j in drop:
                continue
            if _mono_div(lts[i], lts[j]) is not None:
                drop.add(i)
                break
    basis = [b for i, b in enumerate(basis) if i not in drop]
    reps = [r for i, r in enumerate(reps) if i not in drop]

    # inter-reduce tails to a fixed point
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            others = basis[:i] + basis[i + 1:]
            oreps = reps[:i] + reps[i + 1:]
            red, fac = _reduce(basis[i], others, order)
            if red == basis[i]:
                continue
            rep = dict(reps[i])
            _rep_addmul(rep, _compose(fac, oreps), Polynomial.const(table, -1))
            if red.is_zero():
                basis.pop(i)
                reps.pop(i)
            else:
                basis[i], reps[i] = normalized(red, rep)
            changed = True
            break

    idx = sorted(range(len(basis)), key=lambda i: order.key(basis[i].leading_term(order)[0]))
    basis = [basis[i] for i in idx]
    reps = [reps[i] for i in idx]
    for p, rep in zip(basis, reps):
        _rep_check(p, rep, gens)
    return GroebnerBasis(gens, order, basis, reps, degree_bound)


def normal_form(p: Polynomial, basis: GroebnerBasis):
    """Remainder and per-basis-element cofactors:
    p == remainder + sum(cofactors[i] * basis.polys[i])."""
    remainder, factors = _reduce(p, basis.polys, basis.order)
    return remainder, factors


def generator_cofactors(factors: List[Polynomial], basis: GroebnerBasis) -> Dict[str, Polynomial]:
    """Convert basis-element cofactors into original-generator cofactors."""
    return _compose(factors, basis.reps)


def membership(
    p: Polynomial,
    gens: GeneratorSet,
    saturations: Sequence[SaturationRecord] = (),
    order: Optional[MonomialOrder] = None,
    max_power: int = 8,
    limits: Limits = Limits(),
    degree_bound: Optional[int] = None,
    basis: Optional[GroebnerBasis] = None,
    target_id: str = "",
):
    """Certificate that m**k * p lies in the ideal of ``gens``, where m is the
    product of the declared saturation multipliers and k <= max_power is
    minimal (iterative deepening); the string NOT_MEMBER otherwise.

    For weighted-homogeneous inputs the basis is recomputed with a bound that
    grows with the multiplier power actually being tried, so the common case
    (power 0 or 1) stays cheap.
    """
    if p.is_zero():
        return Certificate(p, {}, gens, target_id=target_id)
    mult = None
    if saturations:
        mult = Polynomial.const(p.table, 1)
        for s in saturations:
            mult = mult * s.multiplier
    bounded = (degree_bound is not None and basis is None
               and p.is_weighted_homogeneous()
               and (mult is None or mult.is_weighted_homogeneous()))
    fixed_basis = basis
    bases: dict = {}

    def basis_for(target: Polynomial):
        if fixed_basis is not None:
            return fixed_basis
        key = target.weighted_degree() if bounded else None
        if key not in bases:
            bases[key] = groebner(gens, order, limits=limits, degree_bound=key)
        return bases[key]

    target = p
    for k in range(max_power + 1):
        b = basis_for(target)
        rem, factors = normal_form(target, b)
        if rem.is_zero():
            return Certificate(p, generator_cofactors(factors, b), gens,
                               multiplier=mult, power=k, target_id=target_id)
        if mult is None:
            break
        target = target * mult
    return NOT_MEMBER


def eliminate(gens: GeneratorSet, front_vars: Sequence[str],
              limits: Limits = Limits(), degree_bound: Optional[int] = None) -> GeneratorSet:
    """Generators of the elimination ideal (front variables removed), via a
    block-order Groebner basis; ids elim_1, elim_2, ... in basis order."""
    for v in front_vars:
        if v not in gens.table:
            raise PolyError(f"unknown variable {v!r}")
    order = block_order(gens.table, front_vars)
    gb = groebner(gens, order, limits=limits, degree_bound=degree_bound)
    front_idx = [gens.table.index[v] for v in front_vars]
    out = GeneratorSet(gens.table)
    n = 0
    for p in gb.polys:
        if all(all(m[i] == 0 for i in front_idx) for m in p.terms):
            n += 1
            out.add(Relation(f"elim_{n}", p))
    return out


def saturate(gens: GeneratorSet, multiplier: Polynomial,
             limits: Limits = Limits()) -> GeneratorSet:
    """Generators of the saturation ideal (I : multiplier^infinity), computed by
    adjoining an inverse variable t with relation t*multiplier - 1 and
    eliminating t."""
    if multiplier.is_zero():
        raise PolyError("saturation by the zero polynomial")
    table = gens.table
    aux = "t_sat"
    k = 0
    while aux in table:
        k += 1
        aux = f"t_sat{k}"
    big = table.extend([aux])

    def lift(p: Polynomial) -> Polynomial:
        return Polynomial(big, {m + (0,): c for m, c in p.terms.items()})

    lifted = GeneratorSet(big)
    for r in gens:
        lifted.add(Relation(r.rid, lift(r.poly)))
    t = Polynomial.var(big, aux)
    lifted.add(Relation("one_minus_t_mult", t * lift(multiplier) - Polynomial.const(big, 1)))
    elim = eliminate(lifted, [aux], limits=limits)
    out = GeneratorSet(table)
    n = 0
    for r in elim:
        back = Polynomial(table, {m[:-1]: c for m, c in r.poly.terms.items()})
        n += 1
        out.add(Relation(f"sat_{n}", back))
    return out


def verify_spolys(gb: GroebnerBasis) -> bool:
    """Check the defining Groebner property: every S-polynomial of basis pairs
    (below the degree bound, if truncated) reduces to zero."""
    order = gb.order
    table = gb.gens.table
    for i in range(len(gb.polys)):
        for j in range(i):
            lmi, lci = gb.polys[i].leading_term(order)
            lmj, lcj = gb.polys[j].leading_term(order)
            lcm = _mono_lcm(lmi, lmj)
            if gb.degree_bound is not None and _wdeg(table, lcm) > gb.degree_bound:
                continue
            fi = Polynomial(table, {_mono_div(lcm, lmi): Fraction(1) / Fraction(lci)})
            fj = Polynomial(table, {_mono_div(lcm, lmj): Fraction(1) / Fraction(lcj)})
            s = fi * gb.polys[i] - fj * gb.polys[j]
            rem, _ = _reduce(s, gb.polys, order)
            if not rem.is_zero():
                return False
    return True
