"""Fixed-precision arithmetic in Q_p and the finite coset geometry of GL_2.

An element is pi^v * u with the unit u known modulo p^k (relative precision
k), or BOTTOM: indistinguishable from 0 below a known absolute precision.
Every operation tracks the output precision; any predicate that would have
to guess at exhausted precision raises PrecisionError instead.

The coset side: canonical representatives of (B cap K)\\K modulo the
principal congruence subgroup of level L are indexed by P^1(Z/p^L)
(p^(L-1)(p+1) points), with equal Haar weights summing to vol(K) = 1.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

TOP = math.inf  # stratum of elements of every Iwahori subgroup at this level


class PrecisionError(ArithmeticError):
    """A comparison or residue was requested beyond the known precision."""


class NotInvertibleError(ArithmeticError):
    pass


class NotInKError(ValueError):
    pass


def vp(n: int, p: int) -> int:
    assert n != 0
    v = 0
    while n % p == 0:
        v += 1
        n //= p
    return v


class PadicContext(object):
    """Working context: prime p, working precision N, residue size q = p."""

    def __init__(self, p: int, N: int):
        assert N >= 1
        self.p = p
        self.N = N
        self.q = p
        self._tables: Dict[int, "KPointTable"] = {}

    def elt(self, n: int) -> "ValuedElement":
        """Exact integer as a context element."""
        p, N = self.p, self.N
        if n == 0:
            return ValuedElement(self, None, 0, N)
        v = vp(n, p)
        u = (n // p ** v) % p ** N
        return ValuedElement(self, v, u, v + N)

    def pi_pow(self, v: int, unit: int = 1) -> "ValuedElement":
        return self.elt(unit).shift(v)

    def bottom(self, absprec: Optional[int] = None) -> "ValuedElement":
        return ValuedElement(self, None, 0, self.N if absprec is None else absprec)

    def mat(self, a, b, c, d) -> "Mat2":
        conv = lambda x: x if isinstance(x, ValuedElement) else self.elt(x)
        return Mat2(self, conv(a), conv(b), conv(c), conv(d))

    def identity(self) -> "Mat2":
        return self.mat(1, 0, 0, 1)

    def w(self) -> "Mat2":
        return self.mat(0, 1, 1, 0)

    def gamma(self, r: int = 1) -> "Mat2":
        """diag(pi^-r, 1)."""
        return Mat2(self, self.pi_pow(-r), self.bottom(), self.bottom(), self.elt(1))

    def upper_unipotent(self, x) -> "Mat2":
        return self.mat(1, x, 0, 1)

    def lower_unipotent(self, x) -> "Mat2":
        return self.mat(1, 0, x, 1)

    def point_table(self, level: int) -> "KPointTable":
        if level not in self._tables:
            self._tables[level] = KPointTable(self, level)
        return self._tables[level]


class ValuedElement(object):
    """pi^val * unit known mod p^(absprec - val); val None means BOTTOM."""

    __slots__ = ("ctx", "val", "unit", "absprec")

    def __init__(self, ctx: PadicContext, val: Optional[int], unit: int, absprec: int):
        p, N = ctx.p, ctx.N
        if val is not None:
            rel = absprec - val
            if rel > N:  # cap relative precision at the working precision
                rel, absprec = N, val + N
            if rel <= 0:
                raise PrecisionError("no significant digits left")
            unit %= p ** rel
            if unit % p == 0:
                raise ValueError("unit part divisible by p")
        self.ctx = ctx
        self.val = val
        self.unit = unit
        self.absprec = absprec

    # -- predicates ----------------------------------------------------------

    @property
    def is_bottom(self) -> bool:
        return self.val is None

    def valuation(self) -> int:
        if self.is_bottom:
            raise PrecisionError("valuation of BOTTOM (zero to precision %d)"
                                 % self.absprec)
        return self.val

    def val_ge(self, s: int) -> bool:
        """Decide v(x) >= s, raising if the precision cannot tell."""
        if self.is_bottom:
            if self.absprec >= s:
                return True
            raise PrecisionError("v >= %d undecidable at absprec %d" % (s, self.absprec))
        return self.val >= s

    def val_eq(self, s: int) -> bool:
        if self.is_bottom:
            if self.absprec > s:
                return False
            raise PrecisionError("v == %d undecidable at absprec %d" % (s, self.absprec))
        return self.val == s

    def is_unit(self) -> bool:
        return self.val_eq(0)

    # -- access ----------------------------------------------------------------

    def residue_unit(self, k: int) -> int:
        """The unit part modulo p^k."""
        if self.is_bottom:
            raise PrecisionError("unit of BOTTOM")
        if self.absprec - self.val < k:
            raise PrecisionError("unit known mod p^%d, need p^%d"
                                 % (self.absprec - self.val, k))
        return self.unit % self.ctx.p ** k

    def residue(self, k: int) -> int:
        """The element modulo pi^k as an integer in [0, p^k); needs val >= 0."""
        p = self.ctx.p
        if self.is_bottom:
            if self.absprec < k:
                raise PrecisionError("residue mod p^%d of BOTTOM at %d" % (k, self.absprec))
            return 0
        if self.val < 0:
            raise ValueError("residue of a non-integral element")
        if self.val >= k:
            return 0
        if self.absprec < k:
            raise PrecisionError("element known mod p^%d, need p^%d" % (self.absprec, k))
        return (p ** self.val * self.unit) % p ** k

    # -- arithmetic --------------------------------------------------------------

    def shift(self, j: int) -> "ValuedElement":
        """Multiply by pi^j."""
        if self.is_bottom:
            return ValuedElement(self.ctx, None, 0, self.absprec + j)
        return ValuedElement(self.ctx, self.val + j, self.unit, self.absprec + j)

    def truncate(self, absprec: int) -> "ValuedElement":
        """Forget digits beyond pi^absprec."""
        if self.absprec <= absprec:
            return self
        if self.is_bottom or self.val >= absprec:
            return ValuedElement(self.ctx, None, 0, absprec)
        return ValuedElement(self.ctx, self.val, self.unit, absprec)

    def __neg__(self):
        if self.is_bottom:
            return self
        return ValuedElement(self.ctx, self.val, -self.unit, self.absprec)

    def __add__(self, other: "ValuedElement") -> "ValuedElement":
        ctx, p = self.ctx, self.ctx.p
        if self.is_bottom and other.is_bottom:
            return ValuedElement(ctx, None, 0, min(self.absprec, other.absprec))
        if self.is_bottom or other.is_bottom:
            z, x = (self, other) if self.is_bottom else (other, self)
            if x.val >= z.absprec:
                return ValuedElement(ctx, None, 0, z.absprec)
            A = min(z.absprec, x.absprec)
            return ValuedElement(ctx, x.val, x.unit, A)
        x, y = (self, other) if self.val <= other.val else (other, self)
        A = min(x.absprec, y.absprec)
        rel = A - x.val
        rep = (x.unit + p ** (y.val - x.val) * y.unit) % p ** rel
        if rep == 0:
            return ValuedElement(ctx, None, 0, A)
        j = vp(rep, p)
        return ValuedElement(ctx, x.val + j, rep // p ** j, A)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "ValuedElement") -> "ValuedElement":
        ctx = self.ctx
        if self.is_bottom or other.is_bottom:
            if self.is_bottom and other.is_bottom:
                return ValuedElement(ctx, None, 0, self.absprec + other.absprec)
            z, x = (self, other) if self.is_bottom else (other, self)
            return ValuedElement(ctx, None, 0, z.absprec + x.val)
        rel = min(self.absprec - self.val, other.absprec - other.val)
        v = self.val + other.val
        return ValuedElement(ctx, v, self.unit * other.unit, v + rel)

    def inv(self) -> "ValuedElement":
        if self.is_bottom:
            raise NotInvertibleError("inversion of BOTTOM")
        rel = self.absprec - self.val
        u = pow(self.unit, -1, self.ctx.p ** rel)
        return ValuedElement(self.ctx, -self.val, u, -self.val + rel)

    def __truediv__(self, other: "ValuedElement") -> "ValuedElement":
        return self * other.inv()

    def __repr__(self):
        if self.is_bottom:
            return "O(pi^%d)" % self.absprec
        return "pi^%d*%d + O(pi^%d)" % (self.val, self.unit, self.absprec)


class Mat2(object):
    """2x2 matrix over the context field."""

    __slots__ = ("ctx", "a", "b", "c", "d")

    def __init__(self, ctx, a, b, c, d):
        self.ctx = ctx
        self.a, self.b, self.c, self.d = a, b, c, d

    def __mul__(self, other: "Mat2") -> "Mat2":
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return Mat2(self.ctx, a * e + b * g, a * f + b * h,
                    c * e + d * g, c * f + d * h)

    def det(self) -> ValuedElement:
        return self.a * self.d - self.b * self.c

    def inv(self) -> "Mat2":
        di = self.det().inv()
        return Mat2(self.ctx, self.d * di, -self.b * di, -self.c * di, self.a * di)

    def scale(self, x: ValuedElement) -> "Mat2":
        return Mat2(self.ctx, self.a * x, self.b * x, self.c * x, self.d * x)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def spread(self) -> int:
        """v(det) - 2*min(entry valuations): the level raise of the action."""
        vals = [x.val for x in self.entries() if not x.is_bottom]
        if not vals:
            raise NotInvertibleError("zero matrix")
        return self.det().valuation() - 2 * min(vals)

    def in_K(self) -> bool:
        try:
            return (all(x.is_bottom or x.val >= 0 for x in self.entries())
                    and self.det().is_unit())
        except PrecisionError:
            return False

    def __repr__(self):
        return "Mat2[%r, %r; %r, %r]" % (self.a, self.b, self.c, self.d)


def iwasawa(g: Mat2) -> Tuple[Mat2, Mat2]:
    """Canonical g = b*k with b upper triangular and k in K.

    Pivot rule: if d is non-BOTTOM and v(d) <= v(c) (ties toward d), clear
    the lower-left entry with the row operation through c/d; otherwise pivot
    through w, in the explicit unipotent-normalized form whose k-part is
    [[1, 1+d/c], [1, d/c]].
    """
    ctx = g.ctx
    a, b, c, d = g.a, g.b, g.c, g.d
    if d.is_bottom and c.is_bottom:
        raise NotInvertibleError("bottom row is zero to working precision")
    if not d.is_bottom and not c.is_bottom:
        d_pivot = d.val <= c.val
    elif not d.is_bottom:
        if d.val > c.absprec:
            raise PrecisionError("cannot compare v(c), v(d) at available precision")
        d_pivot = True
    else:
        if c.val >= d.absprec:
            raise PrecisionError("cannot compare v(c), v(d) at available precision")
        d_pivot = False
    if d_pivot:
        r = c / d
        k = Mat2(ctx, ctx.elt(1), ctx.bottom(), r, ctx.elt(1))
        bb = Mat2(ctx, g.det() / d, b, ctx.bottom(), d)
        return bb, k
    e = d / c
    one = ctx.elt(1)
    k = Mat2(ctx, one, one + e, one, e)
    bb = Mat2(ctx, -(g.det() / c), a + a * e - b, ctx.bottom(), c)
    return bb, k


def stratum(k: Mat2):
    """The s with k in I_s \\ I_(s+1); TOP when the lower-left entry is BOTTOM.

    s = v(c) when d is a unit, 0 when c is a unit and d is not.
    """
    c, d = k.c, k.d
    if (not d.is_bottom) and d.val == 0:
        if c.is_bottom:
            return TOP
        if c.val < 0:
            raise NotInKError("negative valuation in %r" % (k,))
        return c.valuation()
    if (not c.is_bottom) and c.val == 0:
        return 0
    raise NotInKError("bottom row %r, %r is not primitive" % (c, d))


class KPointTable(object):
    """Representatives of (B cap K)\\K/K(level), i.e. P^1(Z/p^level).

    Point keys: ('c', c) for [[1,0],[c,1]] with c in Z/p^L (d-unit chart) and
    ('d', d) for [[0,1],[1,d]] with d in p*Z/p^L (c-unit chart).  Each point
    carries the equal Haar weight 1/(p^(L-1)(p+1)) under vol(K) = 1.
    """

    def __init__(self, ctx: PadicContext, level: int):
        assert 1 <= level <= ctx.N
        p = ctx.p
        self.ctx = ctx
        self.level = level
        keys: List[Tuple[str, int]] = [("c", c) for c in range(p ** level)]
        keys += [("d", d) for d in range(0, p ** level, p)]
        self.keys = keys
        self.index = {key: i for i, key in enumerate(keys)}
        self.mats = [self._matrix(key) for key in keys]
        self.weight = Fraction(1, p ** (level - 1) * (p + 1))

    def __len__(self):
        return len(self.keys)

    def _matrix(self, key) -> Mat2:
        kind, r = key
        if kind == "c":
            return self.ctx.mat(1, 0, r, 1)
        return self.ctx.mat(0, 1, 1, r)

    def locate(self, k: Mat2) -> Tuple[int, ValuedElement, ValuedElement]:
        """Index of the point of k plus the upper-triangular correction.

        Returns (i, aa, dd) with k = [[aa, *], [~0, dd]] * mats[i] modulo the
        level congruence subgroup; aa and dd are units.
        """
        L = self.level
        c, d = k.c, k.d
        det = k.det()
        d_unit = (not d.is_bottom) and d.val == 0
        if d_unit:
            key = ("c", (c / d).residue(L))
            aa, dd = det / d, d
        else:
            if d.is_bottom or d.val >= 1:
                if c.is_bottom or c.val != 0:
                    raise NotInKError("row not primitive at level %d" % L)
                key = ("d", (d / c).residue(L))
                aa, dd = -(det / c), c
            else:
                raise NotInKError("unexpected row %r %r" % (c, d))
        return self.index[key], aa, dd

    def strata(self) -> List[float]:
        return [stratum(m) for m in self.mats]


def coset_reps(ctx: PadicContext, level: int) -> List[Tuple[Mat2, Fraction]]:
    """The representative list with Haar weights (vol(K) = 1)."""
    t = ctx.point_table(level)
    return [(m, t.weight) for m in t.mats]


class IfCell(object):
    """One product cell of the open orbit chart: k0 = [[1, b0], [c0, 1]]."""

    __slots__ = ("b0", "c0", "weight")

    def __init__(self, b0: ValuedElement, c0: ValuedElement, weight: Fraction):
        self.b0 = b0
        self.c0 = c0
        self.weight = weight


def if_coordinate_cells(ctx: PadicContext, base_val: int, units_only: bool,
                        digits: int) -> List[Tuple[ValuedElement, Fraction]]:
    """Cells of pi^base_val * O (or O^x) with additive vol(O) = 1.

    Each cell is pi^base_val*(t + p^digits*O); its volume is
    q^(-base_val - digits).
    """
    p = ctx.p
    vol = Fraction(1, p ** digits) * Fraction(p) ** (-base_val)
    out = []
    for t in range(p ** digits):
        if units_only and t % p == 0:
            continue
        cell = ctx.elt(t).shift(base_val).truncate(base_val + digits)
        out.append((cell, vol))
    return out


def if_points(ctx: PadicContext, x: int, y: int, ram1: bool, ram2: bool,
              digits_b: Optional[int] = None,
              digits_c: Optional[int] = None) -> List[IfCell]:
    """Product cells for b0 in pi^(-y) O^(mu'_2), c0 in pi^x O^(mu_1).

    Haar normalization is additive with vol(O) = 1 in each coordinate, which
    pins the orbit integral to q^(y-x) in the doubly unramified case.
    """
    if x - y < 1:
        raise ValueError("need x - y >= 1")
    if digits_b is None:
        digits_b = max(1, ctx.N - 2)
    if digits_c is None:
        digits_c = max(1, ctx.N - x - 1)
    bcells = if_coordinate_cells(ctx, -y, ram2, digits_b)
    ccells = if_coordinate_cells(ctx, x, ram1, digits_c)
    return [IfCell(b0, c0, wb * wc) for b0, wb in bcells for c0, wc in ccells]
