"""Coefficient ring for all representation values.

Two backends behind one interface:

* EXACT -- Laurent polynomials in the unramified parameters
  (a1, b1, a2, b2, a3) over the cyclotomic field Q(zeta_M), with q^(1/2)
  realized as an explicit cyclotomic square root of p (Gauss sum).  The
  parameter b3 never appears: it is eliminated by the central-character
  relation b3 = (a1*b1*a2*b2*a3)^(-1).
* NUMERIC -- complex numbers obtained from a fixed generic assignment of
  the parameters.

Exact elements are kept in canonical form (no zero coefficients), so
``is_zero`` is a syntactic check and equality of values is decidable.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Dict, Optional, Tuple

VARS = ("a1", "b1", "a2", "b2", "a3")
_NVARS = len(VARS)

Expo = Tuple[int, int, int, int, int]
Coef = Tuple[Fraction, ...]


class ScalarError(ValueError):
    pass


class BackendError(ScalarError):
    """Operation not supported by the active backend."""


def _divisors(n: int):
    return [d for d in range(1, n + 1) if n % d == 0]


def _polydiv_exact(num, den):
    """Exact division of integer polynomials (ascending coefficients)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        q, r = divmod(num[i + len(den) - 1], den[-1])
        assert r == 0
        out[i] = q
        for j, c in enumerate(den):
            num[i + j] -= q * c
    assert all(c == 0 for c in num)
    return out


def cyclotomic_polynomial(M: int):
    """Coefficients (ascending) of the M-th cyclotomic polynomial."""
    poly = [-1] + [0] * (M - 1) + [1]
    for d in _divisors(M):
        if d < M:
            poly = _polydiv_exact(poly, cyclotomic_polynomial(d))
    return poly


class CyclotomicField(object):
    """Q(zeta_M) in the power basis 1, zeta, ..., zeta^(phi(M)-1).

    Elements are tuples of Fractions of length phi(M).
    """

    def __init__(self, M: int):
        self.M = M
        phi = cyclotomic_polynomial(M)
        self.deg = len(phi) - 1
        # x^e mod Phi_M for 0 <= e < M  (covers zeta powers and products).
        red = [tuple(Fraction(1 if i == e else 0) for i in range(self.deg))
               for e in range(self.deg)]
        top = tuple(Fraction(-c) for c in phi[:-1])  # x^deg = -(lower part)
        for e in range(self.deg, max(M, 2 * self.deg - 1)):
            prev = red[e - 1]
            shifted = (Fraction(0),) + prev[:-1]
            if prev[-1]:
                shifted = tuple(s + prev[-1] * t for s, t in zip(shifted, top))
            red.append(shifted)
        self._red = red
        self.zero = tuple(Fraction(0) for _ in range(self.deg))
        self.one = self._red[0]

    def zeta(self, j: int) -> Coef:
        return self._red[j % self.M]

    def from_fraction(self, a: Fraction) -> Coef:
        return tuple(a * c for c in self.one)

    def add(self, a: Coef, b: Coef) -> Coef:
        return tuple(x + y for x, y in zip(a, b))

    def neg(self, a: Coef) -> Coef:
        return tuple(-x for x in a)

    def scale(self, a: Coef, c: Fraction) -> Coef:
        return tuple(c * x for x in a)

    def mul(self, a: Coef, b: Coef) -> Coef:
        d = self.deg
        conv = [Fraction(0)] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] += x * y
        out = list(conv[:d])
        for e in range(d, 2 * d - 1):
            if conv[e]:
                row = self._red[e]
                for i in range(d):
                    out[i] += conv[e] * row[i]
        return tuple(out)

    def is_zero(self, a: Coef) -> bool:
        return all(x == 0 for x in a)

    def inv(self, a: Coef) -> Coef:
        """Field inverse by solving the multiplication linear system."""
        if self.is_zero(a):
            raise ScalarError("inverse of zero cyclotomic element")
        d = self.deg
        # Columns: a * zeta^j in the power basis.
        cols = [self.mul(a, self._red[j]) for j in range(d)]
        mat = [[cols[j][i] for j in range(d)] + [self.one[i]] for i in range(d)]
        # Gaussian elimination over Q.
        for c in range(d):
            piv = next(r for r in range(c, d) if mat[r][c] != 0)
            mat[c], mat[piv] = mat[piv], mat[c]
            pc = mat[c][c]
            mat[c] = [x / pc for x in mat[c]]
            for r in range(d):
                if r != c and mat[r][c] != 0:
                    f = mat[r][c]
                    mat[r] = [x - f * y for x, y in zip(mat[r], mat[c])]
        return tuple(mat[i][d] for i in range(d))

    def numeric(self, a: Coef) -> complex:
        z = cmath.exp(2j * cmath.pi / self.M)
        out = 0j
        for i, c in enumerate(a):
            if c:
                out += complex(c) * z ** i
        return out


def _sqrt_p_order(p: int) -> int:
    """Smallest cyclotomic order containing sqrt(p)."""
    if p == 2:
        return 8
    return p if p % 4 == 1 else 4 * p


def _legendre(a: int, p: int) -> int:
    s = pow(a, (p - 1) // 2, p)
    return -1 if s == p - 1 else s


class ScalarRing(object):
    """Shared context for Scalar values.

    mode EXACT needs the prime p and the lcm M of the finite-character
    orders in play; mode NUMERIC additionally carries the parameter
    assignment (complex values for a1, b1, a2, b2, a3) and a tolerance.
    """

    EXACT = "exact"
    NUMERIC = "numeric"

    def __init__(self, p: int, char_order: int = 1, backend: str = EXACT,
                 assignment: Optional[Dict[str, complex]] = None,
                 tol: float = 1e-9):
        if backend not in (self.EXACT, self.NUMERIC):
            raise ScalarError("unknown backend %r" % (backend,))
        self.p = p
        self.backend = backend
        self.char_order = char_order
        self.M = math.lcm(char_order, _sqrt_p_order(p))
        self.tol = tol
        if backend == self.EXACT:
            self.cyclo = CyclotomicField(self.M)
            self._sqrt_p = self._build_sqrt_p()
            self.assignment = None
        else:
            self.cyclo = None
            if assignment is None or any(v not in assignment for v in VARS):
                raise ScalarError("NUMERIC backend needs values for %s" % (VARS,))
            self.assignment = dict(assignment)
            self._sqrt_p_num = math.sqrt(p)

    def _build_sqrt_p(self) -> Coef:
        p, F = self.p, self.cyclo
        if p == 2:
            k = self.M // 8
            return F.add(F.zeta(k), F.zeta(-k))  # 2*cos(pi/4)
        g = F.zero
        k = self.M // p
        for a in range(1, p):
            term = F.zeta(a * k)
            if _legendre(a, p) == 1:
                g = F.add(g, term)
            else:
                g = F.add(g, F.neg(term))
        if p % 4 == 1:
            return g  # Gauss: sum = +sqrt(p)
        # p = 3 mod 4: sum = i*sqrt(p); multiply by zeta_4^3 = -i.
        return F.mul(g, F.zeta(3 * self.M // 4))

    # -- element factories ------------------------------------------------

    def zero(self) -> "Scalar":
        if self.backend == self.EXACT:
            return Scalar(self, {})
        return Scalar(self, 0j)

    def one(self) -> "Scalar":
        return self.from_fraction(Fraction(1))

    def from_fraction(self, a) -> "Scalar":
        a = Fraction(a)
        if self.backend == self.EXACT:
            if a == 0:
                return Scalar(self, {})
            zero_exp: Expo = (0, 0, 0, 0, 0)
            return Scalar(self, {zero_exp: self.cyclo.from_fraction(a)})
        return Scalar(self, complex(a))

    def from_int(self, n: int) -> "Scalar":
        return self.from_fraction(Fraction(n))

    def var(self, name: str, e: int = 1) -> "Scalar":
        i = VARS.index(name)
        if self.backend == self.EXACT:
            exp = tuple(e if j == i else 0 for j in range(_NVARS))
            return Scalar(self, {exp: self.cyclo.one})
        return Scalar(self, self.assignment[name] ** e)

    def monomial(self, exps: Dict[str, int], coeff=Fraction(1)) -> "Scalar":
        out = self.from_fraction(coeff)
        for name, e in exps.items():
            out = out * self.var(name, e)
        return out

    def t(self, e: int = 1) -> "Scalar":
        """q^(1/2) as a ring element (t*t == p)."""
        if self.backend == self.EXACT:
            zero_exp: Expo = (0, 0, 0, 0, 0)
            base = Scalar(self, {zero_exp: self._sqrt_p})
        else:
            base = Scalar(self, complex(self._sqrt_p_num))
        if e >= 0:
            out = self.one()
            for _ in range(e):
                out = out * base
            return out
        return self.t(-e).inverse()

    def q_pow(self, e: int) -> "Scalar":
        return self.from_fraction(Fraction(self.p) ** e)

    def zeta_frac(self, fr: Fraction) -> "Scalar":
        """exp(2*pi*i*fr) as a root of unity; fr must have denominator | M."""
        fr = Fraction(fr)
        if self.M % fr.denominator != 0:
            raise ScalarError("root of unity of order %d not in ring (M=%d)"
                              % (fr.denominator, self.M))
        j = fr.numerator * (self.M // fr.denominator)
        if self.backend == self.EXACT:
            zero_exp: Expo = (0, 0, 0, 0, 0)
            return Scalar(self, {zero_exp: self.cyclo.zeta(j)})
        return Scalar(self, cmath.exp(2j * cmath.pi * j / self.M))

    def geometric_tail(self, ratio: "Scalar", first: "Scalar",
                       margin: float = 1e-6) -> "Scalar":
        """first/(1-ratio); NUMERIC only (the exact ring has no fractions).

        |ratio| > 1 is allowed (analytic continuation; callers flag it);
        |ratio| within margin of 1 is an error.
        """
        if self.backend == self.EXACT:
            raise BackendError("geometric_tail is unsupported in EXACT mode")
        r = ratio.data
        if abs(abs(r) - 1.0) < margin:
            raise ScalarError("geometric tail ratio on the unit circle: %r" % r)
        return Scalar(self, first.data / (1.0 - r))


class Scalar(object):
    """One ring element.  Immutable; arithmetic returns new values."""

    __slots__ = ("ring", "data")

    def __init__(self, ring: ScalarRing, data):
        self.ring = ring
        self.data = data

    # -- helpers -----------------------------------------------------------

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.from_fraction(Fraction(other))
        raise TypeError("cannot coerce %r into Scalar" % (other,))

    @property
    def exact(self) -> bool:
        return self.ring.backend == ScalarRing.EXACT

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if not self.exact:
            return Scalar(self.ring, self.data + other.data)
        F = self.ring.cyclo
        out = dict(self.data)
        for exp, c in other.data.items():
            if exp in out:
                s = F.add(out[exp], c)
                if F.is_zero(s):
                    del out[exp]
                else:
                    out[exp] = s
            else:
                out[exp] = c
        return Scalar(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        if not self.exact:
            return Scalar(self.ring, -self.data)
        F = self.ring.cyclo
        return Scalar(self.ring, {e: F.neg(c) for e, c in self.data.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if not self.exact:
            return Scalar(self.ring, self.data * other.data)
        F = self.ring.cyclo
        out: Dict[Expo, Coef] = {}
        for e1, c1 in self.data.items():
            for e2, c2 in other.data.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                c = F.mul(c1, c2)
                if e in out:
                    c = F.add(out[e], c)
                if F.is_zero(c):
                    out.pop(e, None)
                else:
                    out[e] = c
        return Scalar(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = self.ring.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def inverse(self) -> "Scalar":
        """Invert a unit: any nonzero NUMERIC value, a single-monomial EXACT one."""
        if not self.exact:
            if self.data == 0:
                raise ScalarError("inverse of numeric zero")
            return Scalar(self.ring, 1.0 / self.data)
        if len(self.data) != 1:
            raise ScalarError("EXACT inverse needs a single monomial, got %s" % (self,))
        (exp, coef), = self.data.items()
        inv_exp = tuple(-e for e in exp)
        return Scalar(self.ring, {inv_exp: self.ring.cyclo.inv(coef)})

    def is_monomial(self) -> bool:
        return (not self.exact and self.data != 0) or (self.exact and len(self.data) == 1)

    def is_zero(self, tol: Optional[float] = None) -> bool:
        if self.exact:
            return not self.data
        t = self.ring.tol if tol is None else tol
        if t is None or t <= 0:
            raise ScalarError("NUMERIC zero test needs a positive tolerance")
        return abs(self.data) < t

    def __eq__(self, other):
        if not isinstance(other, (Scalar, int, Fraction)):
            return NotImplemented
        other = self._coerce(other)
        if self.exact:
            return self.data == other.data
        return self.data == other.data

    def __ne__(self, other):
        r = self.__eq__(other)
        return NotImplemented if r is NotImplemented else not r

    def __hash__(self):
        raise TypeError("Scalar values are unhashable")

    # -- evaluation & display ------------------------------------------------

    def numeric_eval(self, assignment: Dict[str, complex]) -> complex:
        """Evaluation homomorphism at a parameter assignment (EXACT only)."""
        if not self.exact:
            return self.data
        F = self.ring.cyclo
        out = 0j
        for exp, coef in self.data.items():
            term = F.numeric(coef)
            for name, e in zip(VARS, exp):
                if e:
                    term *= assignment[name] ** e
            out += term
        return out

    def serialize(self) -> str:
        if not self.exact:
            return "%.12g%+.12gj" % (self.data.real, self.data.imag)
        if not self.data:
            return "0"
        parts = []
        for exp in sorted(self.data):
            coef = self.data[exp]
            cs = "[" + ",".join(str(x) for x in coef) + "]"
            vs = "*".join("%s^%d" % (n, e) for n, e in zip(VARS, exp) if e)
            parts.append(cs + ("*" + vs if vs else ""))
        return " + ".join(parts)

    def __repr__(self):
        return "Scalar(%s)" % self.serialize()
