"""Quasi-characters of Q_p^x and characters of the Borel subgroup.

A quasi-character is a finite-order character of the units (given by its
images on fixed generators of (Z/p^m)^x, stored as exponents in Q/Z) plus
its value at pi, an invertible Scalar monomial.  Conductors are always the
minimal ones; products recompute them instead of assuming the max.

The unit group conventions: (Z/p^m)^x is cyclic for odd p (one fixed
primitive root); for p = 2 it is trivial (m = 1), {+-1} (m = 2), and
<-1> x <5> for m >= 3.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .padic import Mat2, PrecisionError, ValuedElement
from .scalars import Scalar, ScalarRing


class CharacterError(ValueError):
    pass


def primitive_root(p: int) -> int:
    """Smallest primitive root mod p that stays primitive mod all p^m."""
    assert p % 2 == 1
    fac = []
    n = p - 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            fac.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        fac.append(n)
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in fac):
            if pow(g, p - 1, p * p) == 1:
                g += p
            return g
    raise AssertionError("no primitive root")


class UnitGroup(object):
    """(Z/p^m)^x with fixed generators and a cached discrete-log table."""

    _cache: Dict[Tuple[int, int], "UnitGroup"] = {}

    def __new__(cls, p: int, m: int, dlog_data: Optional[dict] = None):
        key = (p, m)
        if key in cls._cache and dlog_data is None:
            return cls._cache[key]
        self = object.__new__(cls)
        self.p, self.m = p, m
        q = p ** m
        if m == 0 or (p == 2 and m == 1):
            self.gens, self.orders = [], []
        elif p == 2 and m == 2:
            self.gens, self.orders = [3], [2]
        elif p == 2:
            self.gens, self.orders = [q - 1, 5], [2, 2 ** (m - 2)]
        else:
            self.gens = [primitive_root(p) % q]
            self.orders = [(p - 1) * p ** (m - 1)]
        if dlog_data is not None:
            self.dlog = {int(k): tuple(v) for k, v in dlog_data.items()}
        else:
            self.dlog = self._build_dlog()
        cls._cache[key] = self
        return self

    def _build_dlog(self) -> Dict[int, Tuple[int, ...]]:
        q = self.p ** self.m
        table = {1 % q: tuple(0 for _ in self.gens)}
        frontier = [1 % q]
        while frontier:
            new = []
            for u in frontier:
                exps = table[u]
                for i, g in enumerate(self.gens):
                    v = (u * g) % q
                    if v not in table:
                        e = list(exps)
                        e[i] = (e[i] + 1) % self.orders[i]
                        table[v] = tuple(e)
                        new.append(v)
            frontier = new
        return table

    def units(self) -> List[int]:
        return sorted(self.dlog)

    def exponents(self, u: int) -> Tuple[int, ...]:
        q = self.p ** self.m
        u %= q
        if u not in self.dlog:
            raise CharacterError("%d is not a unit mod %d^%d" % (u, self.p, self.m))
        return self.dlog[u]


class FiniteCharacter(object):
    """Character of (Z/p^m)^x with minimal m; images live in Q/Z.

    images[i] is the exponent fr with chi(gen_i) = exp(2*pi*i*fr).
    """

    __slots__ = ("p", "m", "images")

    def __init__(self, p: int, m: int, images: Tuple[Fraction, ...], reduce: bool = True):
        grp = UnitGroup(p, m)
        if len(images) != len(grp.gens):
            raise CharacterError("expected %d generator images" % len(grp.gens))
        for fr, order in zip(images, grp.orders):
            if (fr * order).denominator != 1:
                raise CharacterError("image order %s incompatible with generator order %d"
                                     % (fr.denominator, order))
        self.p, self.m = p, m
        self.images = tuple(Fraction(fr) % 1 for fr in images)
        if reduce:
            red = self._reduced()
            self.m, self.images = red

    @classmethod
    def trivial(cls, p: int) -> "FiniteCharacter":
        return cls(p, 0, ())

    @classmethod
    def from_orders(cls, p: int, m: int, orders: Tuple[int, ...]) -> "FiniteCharacter":
        """Character sending generator i to a primitive orders[i]-th root."""
        grp = UnitGroup(p, m)
        if len(orders) != len(grp.gens):
            raise CharacterError("need %d orders for (Z/%d^%d)^x" % (len(grp.gens), p, m))
        images = tuple(Fraction(1, o) for o in orders)
        chi = cls(p, m, images, reduce=False)
        if chi._reduced()[0] != m:
            raise CharacterError("conductor %d is not minimal for orders %s" % (m, orders))
        return chi

    def _reduced(self) -> Tuple[int, Tuple[Fraction, ...]]:
        """Minimal conductor and the images on the smaller unit group."""
        p = self.p
        for m2 in range(self.m + 1):
            grp = UnitGroup(p, self.m)
            ok = all(self.eval_frac(u) == 0
                     for u in grp.units() if u % p ** m2 == 1 % p ** m2)
            if ok:
                small = UnitGroup(p, m2)
                return m2, tuple(self.eval_frac(g) for g in small.gens)
        raise AssertionError

    def eval_frac(self, u: int) -> Fraction:
        """Exponent in Q/Z of the value at the unit u."""
        if self.m == 0:
            return Fraction(0)
        grp = UnitGroup(self.p, self.m)
        exps = grp.exponents(u)
        return sum((e * fr for e, fr in zip(exps, self.images)), Fraction(0)) % 1

    def order(self) -> int:
        return math.lcm(1, *(fr.denominator for fr in self.images))

    def is_trivial(self) -> bool:
        return self.m == 0

    def mul(self, other: "FiniteCharacter") -> "FiniteCharacter":
        m = max(self.m, other.m)
        grp = UnitGroup(self.p, m)
        images = tuple((self.eval_frac(g) + other.eval_frac(g)) % 1 for g in grp.gens)
        return FiniteCharacter(self.p, m, images)

    def inv(self) -> "FiniteCharacter":
        return FiniteCharacter(self.p, self.m, tuple((-fr) % 1 for fr in self.images),
                               reduce=False)

    def __eq__(self, other):
        return (self.p, self.m, self.images) == (other.p, other.m, other.images)

    def __hash__(self):
        return hash((self.p, self.m, self.images))

    def __repr__(self):
        return "FiniteCharacter(p=%d, m=%d, %s)" % (self.p, self.m, self.images)


class QuasiCharacter(object):
    """chi(pi^v u) = pi_val^v * finite(u)."""

    __slots__ = ("ring", "finite", "pi_val", "tag")

    def __init__(self, ring: ScalarRing, finite: FiniteCharacter, pi_val: Scalar,
                 tag: Optional[str] = None):
        if not pi_val.is_monomial():
            raise CharacterError("value at pi must be an invertible monomial")
        self.ring = ring
        self.finite = finite
        self.pi_val = pi_val
        self.tag = tag

    @property
    def conductor(self) -> int:
        return self.finite.m

    @property
    def is_unramified(self) -> bool:
        return self.finite.m == 0

    @property
    def units_only(self) -> bool:
        """The O^mu convention: O if unramified, O^x if ramified."""
        return not self.is_unramified

    def eval_unit(self, u: int) -> Scalar:
        return self.ring.zeta_frac(self.finite.eval_frac(u))

    def eval(self, x: ValuedElement) -> Scalar:
        v = x.valuation()
        out = self.pi_val ** v
        if not self.finite.is_trivial():
            u = x.residue_unit(self.finite.m)
            out = out * self.eval_unit(u)
        else:
            x.residue_unit(1)  # still insist the unit is visible
        return out

    def mul(self, other: "QuasiCharacter") -> "QuasiCharacter":
        return QuasiCharacter(self.ring, self.finite.mul(other.finite),
                              self.pi_val * other.pi_val)

    def inv(self) -> "QuasiCharacter":
        return QuasiCharacter(self.ring, self.finite.inv(), self.pi_val.inverse())

    def norm_twist(self, e: int) -> "QuasiCharacter":
        """Multiply by |.|^(e/2), i.e. the value at pi by t^(-e)."""
        return QuasiCharacter(self.ring, self.finite, self.pi_val * self.ring.t(-e))


class BorelCharacter(object):
    """(mu, mu') with a delta^(h) twist carried as twice_delta = 2h.

    eval_upper([[a, *], [0, d]]) = mu(a) mu'(d) t^(-2h (v(a) - v(d))).
    """

    __slots__ = ("mu", "mu_prime", "twice_delta")

    def __init__(self, mu: QuasiCharacter, mu_prime: QuasiCharacter, twice_delta: int = 1):
        self.mu = mu
        self.mu_prime = mu_prime
        self.twice_delta = twice_delta

    @property
    def ring(self) -> ScalarRing:
        return self.mu.ring

    def conductor(self) -> int:
        return self.mu.conductor + self.mu_prime.conductor

    def eval_upper(self, b: Mat2) -> Scalar:
        if not b.c.is_bottom:
            raise ValueError("matrix is not upper triangular to working precision")
        va, vd = b.a.valuation(), b.d.valuation()
        out = self.mu.eval(b.a) * self.mu_prime.eval(b.d)
        e = -self.twice_delta * (va - vd)
        if e:
            out = out * self.ring.t(e)
        return out

    def omega(self) -> QuasiCharacter:
        return self.mu.mul(self.mu_prime)

    def res_product(self, other: "BorelCharacter") -> "BorelCharacter":
        return BorelCharacter(self.mu.mul(other.mu),
                              self.mu_prime.mul(other.mu_prime),
                              self.twice_delta + other.twice_delta)


def make_principal_series(ring: ScalarRing, index: int,
                          fin_mu: FiniteCharacter, fin_mu_prime: FiniteCharacter,
                          alpha: Optional[Scalar] = None,
                          beta: Optional[Scalar] = None) -> BorelCharacter:
    """chi_i with the standard normalization mu(pi) = a_i^-1 t, mu'(pi) = b_i^-1 t^-1.

    alpha/beta override the parameter monomials (used by tied-parameter cases
    and by the eliminated b3 = (a1 b1 a2 b2 a3)^-1).
    """
    if alpha is None:
        alpha = ring.var("a%d" % index)
    if beta is None:
        beta = beta3_eliminated(ring) if index == 3 else ring.var("b%d" % index)
    mu = QuasiCharacter(ring, fin_mu, alpha.inverse() * ring.t(), tag="mu%d" % index)
    mup = QuasiCharacter(ring, fin_mu_prime, beta.inverse() * ring.t(-1),
                         tag="mu'%d" % index)
    return BorelCharacter(mu, mup, twice_delta=1)


def beta3_eliminated(ring: ScalarRing) -> Scalar:
    """b3 = (a1 b1 a2 b2 a3)^-1 from omega1 omega2 omega3 = 1."""
    prod = ring.one()
    for name in ("a1", "b1", "a2", "b2", "a3"):
        prod = prod * ring.var(name)
    return prod.inverse()


def central_check(chi1: BorelCharacter, chi2: BorelCharacter,
                  omega3: QuasiCharacter):
    """omega1 * omega2 * omega3 = 1, exactly.

    Returns (ok, witness) where a False verdict carries either a unit u with
    a nontrivial finite value or the offending value at pi.
    """
    om = chi1.omega().mul(chi2.omega()).mul(omega3)
    if not om.finite.is_trivial():
        grp = UnitGroup(om.finite.p, om.finite.m)
        for u in grp.units():
            if om.finite.eval_frac(u) != 0:
                return False, ("unit", u, om.eval_unit(u))
        raise AssertionError("nontrivial finite character with trivial values")
    ok = (om.pi_val - om.ring.one()).is_zero()
    return ok, (None if ok else ("pi", om.pi_val))
