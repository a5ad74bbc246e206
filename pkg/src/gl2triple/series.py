"""Level-L models of induced representations restricted to K.

A model vector is a function on the coset points of level L; evaluation
anywhere on G goes through the Iwasawa decomposition and the chi*delta^(1/2)
twist, so the right-translation action is

    (g.v)(k) = chi delta^(1/2)(b(kg)) v(k(kg)).

The module holds the new-vector constructions, the closed forms for the
gamma-translates, the star-vector combinations, Iwahori eigenspaces (exact,
via a weighted union-find on the point graph), and the Steinberg-twist
realizations (kernel line / sub-of-induced with its quotient functional).
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .characters import BorelCharacter, QuasiCharacter, UnitGroup
from .padic import (Mat2, NotInKError, PadicContext, TOP, iwasawa, stratum)
from .scalars import Scalar, ScalarRing


class ModelError(ValueError):
    pass


class KModelVector(object):
    """Values on the level-L coset points, chi-equivariantly extended to G."""

    __slots__ = ("chi", "table", "values")

    def __init__(self, chi: BorelCharacter, table, values: List[Scalar]):
        assert len(values) == len(table)
        self.chi = chi
        self.table = table
        self.values = values

    @property
    def ring(self) -> ScalarRing:
        return self.chi.ring

    @property
    def level(self) -> int:
        return self.table.level

    def value_at_K(self, k: Mat2) -> Scalar:
        i, aa, dd = self.table.locate(k)
        return self.chi.mu.eval(aa) * self.chi.mu_prime.eval(dd) * self.values[i]

    def value_at_G(self, g: Mat2) -> Scalar:
        b, k = iwasawa(g)
        return self.chi.eval_upper(b) * self.value_at_K(k)

    # -- linear structure ----------------------------------------------------

    def _zip(self, other: "KModelVector", op):
        if self.table is not other.table:
            raise ModelError("level mismatch: %d vs %d" % (self.level, other.level))
        return KModelVector(self.chi, self.table,
                            [op(x, y) for x, y in zip(self.values, other.values)])

    def __add__(self, other):
        return self._zip(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._zip(other, lambda x, y: x - y)

    def scale(self, c: Scalar) -> "KModelVector":
        return KModelVector(self.chi, self.table, [c * x for x in self.values])

    def is_zero(self, tol: Optional[float] = None) -> bool:
        return all(x.is_zero(tol) for x in self.values)

    def equals(self, other: "KModelVector", tol: Optional[float] = None) -> bool:
        return (self - other).is_zero(tol)

    def lift(self, level: int) -> "KModelVector":
        """Same vector on a finer point set."""
        if level == self.level:
            return self
        if level < self.level:
            raise ModelError("cannot coarsen a model vector")
        table = self.table.ctx.point_table(level)
        return KModelVector(self.chi, table,
                            [self.value_at_K(m) for m in table.mats])

    def support_strata(self, tol: Optional[float] = None):
        return sorted({stratum(m) for m, x in zip(self.table.mats, self.values)
                       if not x.is_zero(tol)})


class TranslatedVector(object):
    """v right-translated by a fixed group element: value_at_G(g) = v(g*h)."""

    __slots__ = ("base", "right", "level")

    def __init__(self, base, right: Mat2):
        self.base = base
        self.right = right
        self.level = base.level + right.spread()

    @property
    def chi(self):
        return self.base.chi

    @property
    def ring(self):
        return self.base.ring

    def value_at_G(self, g: Mat2) -> Scalar:
        return self.base.value_at_G(g * self.right)


def act(g: Mat2, v: KModelVector) -> KModelVector:
    """(g.v)(k) = v(kg), materialized at level L + spread(g)."""
    ctx = v.table.ctx
    table = ctx.point_table(v.level + g.spread())
    return KModelVector(v.chi, table, [v.value_at_G(m * g) for m in table.mats])


def gamma_act(ctx: PadicContext, v: KModelVector, r: int) -> KModelVector:
    for _ in range(r):
        v = act(ctx.gamma(), v)
    return v


def alpha_of(chi: BorelCharacter) -> Scalar:
    """alpha with alpha^-1 = mu(pi) |pi|^(1/2)."""
    return (chi.mu.pi_val * chi.ring.t(-1)).inverse()


def beta_of(chi: BorelCharacter) -> Scalar:
    """beta with beta^-1 = mu'(pi) |pi|^(-1/2)."""
    return (chi.mu_prime.pi_val * chi.ring.t(1)).inverse()


def ramification_case(chi: BorelCharacter) -> str:
    mu_r = not chi.mu.is_unramified
    mup_r = not chi.mu_prime.is_unramified
    if not mu_r and not mup_r:
        return "NR"
    if mu_r and mup_r:
        return "SP0"
    if not mu_r:
        return "SP1"
    return "SP2"


def new_vector(chi: BorelCharacter, table) -> KModelVector:
    """The new vector of Ind(chi) at level L >= conductor + 1.

    Unramified: identically 1 on K.  Ramified: supported on the double coset
    of [[1,0],[pi^m,1]] (m = cond(mu')), normalized to 1 there, with the
    values forced by equivariance.
    """
    ring = chi.ring
    mu, mup = chi.mu, chi.mu_prime
    m = mup.conductor
    n = chi.conductor()
    if table.level < n + 1:
        raise ModelError("level %d < conductor %d + 1" % (table.level, n))
    case = ramification_case(chi)
    values = []
    for k in table.mats:
        s = stratum(k)
        if case == "NR":
            values.append(ring.one())
        elif case == "SP0":
            if s == m:
                values.append(mu.eval(k.det() / k.c.shift(-m)) * mup.eval(k.d))
            else:
                values.append(ring.zero())
        elif case == "SP1":
            values.append(mup.eval(k.d) if s >= n else ring.zero())
        else:  # SP2: mu ramified, mu' unramified, m = 0
            if s == 0:
                values.append(mu.eval(k.det() / k.c))
            else:
                values.append(ring.zero())
    return KModelVector(chi, table, values)


_VARIANTS = ("plain", "minus_alpha", "minus_beta")


def gamma_closed_form(chi: BorelCharacter, r: int, k: Mat2,
                      variant: str = "plain") -> Scalar:
    """Closed form of (gamma^r . v)(k) and of the two subtracted combinations.

    variant "minus_alpha" is gamma^r v - alpha^-1 gamma^(r+1) v and
    "minus_beta" is gamma^r v - beta gamma^(r-1) v (r >= 1).  Cases without
    a stated closed form fall back to the difference of plain values.
    """
    if variant not in _VARIANTS:
        raise ModelError("unknown variant %r" % (variant,))
    ring = chi.ring
    case = ramification_case(chi)
    alpha, beta = alpha_of(chi), beta_of(chi)
    mu, mup = chi.mu, chi.mu_prime
    m = mup.conductor
    n = chi.conductor()
    s = stratum(k)

    if variant == "minus_alpha" and case not in ("NR", "SP1"):
        return (gamma_closed_form(chi, r, k) -
                alpha.inverse() * gamma_closed_form(chi, r + 1, k))
    if variant == "minus_beta" and case not in ("NR", "SP2"):
        if r < 1:
            raise ModelError("minus_beta needs r >= 1")
        return (gamma_closed_form(chi, r, k) -
                beta * gamma_closed_form(chi, r - 1, k))

    if case == "NR":
        if variant == "plain":
            if s >= r:
                return alpha ** r
            return alpha ** int(s) * beta ** (r - int(s))
        if variant == "minus_alpha":
            if s >= r + 1:
                return ring.zero()
            si = int(min(s, r))
            return alpha ** si * beta ** (r - si) - alpha ** (si - 1) * beta ** (r + 1 - si)
        if r < 1:
            raise ModelError("minus_beta needs r >= 1")
        if s >= r:
            return alpha ** r - alpha ** (r - 1) * beta
        return ring.zero()

    if case == "SP0":
        if s == m + r:
            tw = mu.eval(k.det() / k.c.shift(-(m + r))) * mup.eval(k.d)
            return alpha ** r * tw
        return ring.zero()

    if case == "SP1":
        bound = n + r
        if variant == "plain":
            return alpha ** r * mup.eval(k.d) if s >= bound else ring.zero()
        return alpha ** r * mup.eval(k.d) if s == bound else ring.zero()

    # SP2
    if variant == "plain":
        if s >= r + 1:
            return ring.zero()
        si = int(s)
        return alpha ** si * beta ** (r - si) * mu.eval(k.det() / k.c.shift(-si))
    if r < 1:
        raise ModelError("minus_beta needs r >= 1")
    if s == r:
        return alpha ** r * mu.eval(k.det() / k.c.shift(-r))
    return ring.zero()


def star_vector(ctx: PadicContext, chi: BorelCharacter, side: int,
                exponent: int) -> KModelVector:
    """The v* combinations attached to a star exponent (x for side 1, y for 2)."""
    n = chi.conductor()
    m = chi.mu_prime.conductor
    base = new_vector(chi, ctx.point_table(n + 1))
    alpha, beta = alpha_of(chi), beta_of(chi)
    if side == 1:
        if not chi.mu_prime.is_unramified:
            j = exponent - m
            if j < 0:
                raise ModelError("need exponent >= cond(mu')")
            return gamma_act(ctx, base, j)
        if exponent < 1:
            raise ModelError("need exponent >= 1 for the unramified-mu' combination")
        hi = gamma_act(ctx, base, exponent)
        lo = gamma_act(ctx, base, exponent - 1).lift(hi.level)
        return hi - lo.scale(beta)
    if side == 2:
        if not chi.mu.is_unramified:
            j = exponent - m
            if j < 0:
                raise ModelError("need exponent >= cond(mu')")
            return gamma_act(ctx, base, j)
        j = exponent - n
        if j < 0:
            raise ModelError("need exponent >= conductor")
        lo = gamma_act(ctx, base, j)
        hi = gamma_act(ctx, base, j + 1)
        return lo.lift(hi.level) - hi.scale(alpha.inverse())
    raise ModelError("side must be 1 or 2")


def expected_star_support(side: int, chi: BorelCharacter, exponent: int):
    """Support prediction: strata set as (kind, bound)."""
    if side == 1:
        return ("eq", exponent) if not chi.mu.is_unramified else ("ge", exponent)
    return ("eq", exponent) if not chi.mu_prime.is_unramified else ("le", exponent)


# -- Iwahori eigenspaces ------------------------------------------------------


def iwahori_generators(ctx: PadicContext, s: int, level: int) -> List[Tuple[Mat2, int]]:
    """Generators of the image of I_s in GL_2(Z/p^level), with d-entries."""
    p = ctx.p
    gens = [(ctx.upper_unipotent(1), 1),
            (ctx.lower_unipotent(p ** s), 1)]
    for g in UnitGroup(p, level).gens:
        gens.append((ctx.mat(g, 0, 0, 1), 1))
        gens.append((ctx.mat(1, 0, 0, g), g))
    return gens


class Eigenspace(object):
    def __init__(self, dim: int, basis: List[KModelVector], note: str = ""):
        self.dim = dim
        self.basis = basis
        self.note = note


def eigenspace(chi: BorelCharacter, table, s: int,
               omega: QuasiCharacter) -> Eigenspace:
    """{v : k.v = omega(d_k) v for k in I_s mod K(level)} -- exact dim and basis.

    Each generator equation couples two points by an invertible monomial, so
    the system is a gauge problem on a graph: a component contributes 1 to
    the dimension iff all its cycle products are trivial.  When
    cond(omega) > s the condition is inconsistent on I_s itself (the d-entry
    reduction is no longer a character), hence dimension 0; a witness pair
    is recorded.
    """
    ctx = table.ctx
    ring = chi.ring
    if omega.conductor > s:
        p = ctx.p
        grp = UnitGroup(p, omega.conductor)
        witness = next(u for u in grp.units()
                       if u % p ** s == 1 % p ** s
                       and omega.finite.eval_frac(u) != 0)
        return Eigenspace(0, [], "inconsistent: omega(1 + pi^%d o) != 1 at u=%d"
                          % (s, witness))
    P = len(table)
    parent = list(range(P))
    pot: List[Optional[Scalar]] = [ring.one() for _ in range(P)]
    bad = [False] * P

    def find(i: int) -> Tuple[int, Scalar]:
        f = ring.one()
        while parent[i] != i:
            f = f * pot[i]
            i = parent[i]
        return i, f

    def union(i: int, j: int, r: Scalar):
        # constraint v[j] = r * v[i]
        ri, fi = find(i)
        rj, fj = find(j)
        if ri == rj:
            if not (fj - r * fi).is_zero():
                bad[ri] = True
            return
        parent[rj] = ri
        pot[rj] = fj.inverse() * r * fi
        if bad[rj]:
            bad[ri] = True

    for g, d_entry in iwahori_generators(ctx, s, table.level):
        wfac = omega.eval_unit(d_entry)
        for i, m in enumerate(table.mats):
            j, aa, dd = table.locate(m * g)
            factor = chi.mu.eval(aa) * chi.mu_prime.eval(dd)
            union(i, j, wfac * factor.inverse())

    roots = {}
    for i in range(P):
        r, f = find(i)
        roots.setdefault(r, []).append((i, f))
    basis = []
    for r, members in sorted(roots.items()):
        if bad[r]:
            continue
        values = [ring.zero() for _ in range(P)]
        for i, f in members:
            values[i] = f
        basis.append(KModelVector(chi, table, values))
    return Eigenspace(len(basis), basis)


# -- pairings and Steinberg realizations -------------------------------------


def det_twist_vector(chi: BorelCharacter, table, eta: QuasiCharacter) -> KModelVector:
    """The function k -> eta(det k) as a vector of the chi-model."""
    return KModelVector(chi, table, [eta.eval(m.det()) for m in table.mats])


def coset_pairing(v: KModelVector, w) -> Scalar:
    """sum of v(k) w(k) over the points, with the vol(K)=1 Haar weights.

    The canonical duality pairing when the chi-parameters of v and w are
    mutually inverse; w may be any object with values aligned to v's table.
    """
    ring = v.ring
    out = ring.zero()
    wt = ring.from_fraction(v.table.weight)
    for x, y in zip(v.values, w.values):
        out = out + x * y * wt
    return out


def steinberg_model(ring: ScalarRing, eta: QuasiCharacter) -> BorelCharacter:
    """Ind(eta |.|^(1/2), eta |.|^(-1/2)): contains eta x St as the subspace
    killed by the quotient functional onto the line eta o det."""
    return BorelCharacter(eta.norm_twist(1), eta.norm_twist(-1), twice_delta=1)


def steinberg_quotient_functional(v: KModelVector, eta: QuasiCharacter) -> Scalar:
    """The G-map Ind(eta|.|^(1/2), eta|.|^(-1/2)) ->> eta o det at v."""
    return coset_pairing(v, det_twist_vector(v.chi, v.table, eta.inv()))


def steinberg_conductor(eta: QuasiCharacter) -> int:
    return max(1, 2 * eta.conductor)


def steinberg_new_vector(ctx: PadicContext, ring: ScalarRing,
                         eta: QuasiCharacter, level: int) -> KModelVector:
    """New vector of the eta x St subspace inside the induced model."""
    chi = steinberg_model(ring, eta)
    n = steinberg_conductor(eta)
    table = ctx.point_table(level)
    eig = eigenspace(chi, table, n, chi.omega())
    qs = [steinberg_quotient_functional(b, eta) for b in eig.basis]
    kernel = [b for b, qv in zip(eig.basis, qs) if qv.is_zero()]
    if kernel:
        if len(kernel) == 1:
            return kernel[0]
        raise ModelError("new line of the Steinberg subspace is not unique")
    pivot = next(i for i, qv in enumerate(qs) if not qv.is_zero())
    others = [i for i in range(len(qs)) if i != pivot]
    if len(others) != 1:
        raise ModelError("unexpected eigenspace dimension %d" % eig.dim)
    i = others[0]
    return eig.basis[i].scale(qs[pivot]) - eig.basis[pivot].scale(qs[i])


def steinberg_kernel_witness(w: KModelVector, eta: QuasiCharacter) -> Scalar:
    """Zero iff w is a multiple of the kernel line eta o det.

    Returns the first nonzero discrepancy among the eta^-1-twisted values
    (a canonical Scalar witness), else the ring zero.
    """
    ring = w.ring
    twisted = [x * eta.inv().eval(m.det())
               for x, m in zip(w.values, w.table.mats)]
    ref = twisted[0]
    for x in twisted[1:]:
        d = x - ref
        if not d.is_zero():
            return d
    return ring.zero()
