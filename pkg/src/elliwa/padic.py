"""Fixed-precision p-adic scalars and cyclotomic semilocal rings.

The coefficient rings are (Z/p^N)[x]/(Phi_c) tensor (Z/p^N)[y]/(Phi_{p^k})
with p coprime to c.  They are kept semilocal: Phi_c is never factored mod p.
Internally the x-leg is itself a tensor over the prime powers dividing c,
which makes every subring extraction basis-aligned.

Elements carry an explicit denominator exponent e, so a CycloElem models
p^{-e} * (integral part) and its guaranteed absolute precision is N - e.
Identity checks report residual valuations against that tracked precision.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction


INF = 10 ** 9  # sentinel valuation for an exact zero


class NotAUnit(ValueError):
    pass


class NotInSubring(ArithmeticError):
    """A trace failed to land in the target subring at tracked precision."""


class SingularOperator(ArithmeticError):
    pass


class NonInvertibleOperator(ArithmeticError):
    """phi-linear solve hit the anomalous case."""


class IntegralityFailure(ArithmeticError):
    pass


def vp(n: int, p: int) -> int:
    """p-adic valuation of an integer; INF for 0."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class PadicScalar:
    """p-adic number as p^v * u with u a unit mod p^N (N relative digits).

    The guaranteed absolute precision is v + N.  Zero is represented by
    u = 0 together with v = the exponent up to which vanishing is known
    (INF for the exact zero).
    """

    __slots__ = ("p", "v", "u", "N")

    def __init__(self, p, v, u, N):
        self.p = p
        if u == 0:
            self.v, self.u, self.N = v, 0, N
            return
        w = vp(u, p)
        if w:
            v, u = v + w, u // p ** w
        self.v = v
        self.u = u % p ** N
        self.N = N

    @classmethod
    def from_int(cls, n, p, N):
        if n == 0:
            return cls(p, INF, 0, N)
        return cls(p, 0, n, N)

    @classmethod
    def from_fraction(cls, q, p, N):
        q = Fraction(q)
        if q == 0:
            return cls(p, INF, 0, N)
        v = vp(q.numerator, p) - vp(q.denominator, p)
        num = q.numerator // p ** max(vp(q.numerator, p), 0)
        den = q.denominator // p ** max(vp(q.denominator, p), 0)
        u = num * pow(den, -1, p ** N) % p ** N
        return cls(p, v, u, N)

    @classmethod
    def zero(cls, p, floor=INF):
        return cls(p, floor, 0, 0)

    @property
    def is_zero(self):
        return self.u == 0

    def floor(self):
        """Absolute precision exponent: value is known mod p^floor."""
        return self.v if self.is_zero else min(self.v + self.N, INF)

    def valuation(self):
        return self.v

    def residue_vanishes(self, k):
        """Whether the value is known to be divisible by p^k."""
        return self.v >= k

    def __neg__(self):
        return PadicScalar(self.p, self.v, -self.u % self.p ** self.N, self.N)

    def __add__(self, other):
        other = self._coerce(other)
        p = self.p
        floor = min(self.floor(), other.floor())
        if self.is_zero and other.is_zero:
            return PadicScalar(p, floor, 0, 0)
        vmin = min(x.v for x in (self, other) if not x.is_zero)
        mod = p ** max(floor - vmin, 0)
        s = 0
        for x in (self, other):
            if not x.is_zero:
                s += x.u * p ** (x.v - vmin)
        s %= mod
        if s == 0:
            return PadicScalar(p, floor, 0, 0)
        w = vp(s, p)
        return PadicScalar(p, vmin + w, s // p ** w, floor - vmin - w)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        p = self.p
        if self.is_zero or other.is_zero:
            return PadicScalar(p, min(self.v + other.v, INF), 0, 0)
        N = min(self.N, other.N)
        return PadicScalar(p, self.v + other.v,
                           self.u * other.u % p ** max(N, 1), N)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return self._coerce(other) - self

    def inverse(self):
        if self.is_zero:
            raise ZeroDivisionError("inverse of (tracked) zero")
        return PadicScalar(self.p, -self.v,
                           pow(self.u, -1, self.p ** self.N), self.N)

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = PadicScalar.from_int(1, self.p, self.N if not self.is_zero else 1)
        b = self
        while k:
            if k & 1:
                out = out * b
            b = b * b
            k >>= 1
        return out

    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        if isinstance(other, (int, Fraction)):
            return PadicScalar.from_fraction(other, self.p, max(self.N, 1))
        return NotImplemented

    def lift(self, prec=None):
        """Integer representative mod p^prec; requires v >= 0."""
        if self.is_zero:
            return 0
        if self.v < 0:
            raise ValueError("negative valuation has no integral lift")
        prec = self.floor() if prec is None else prec
        return self.u * self.p ** self.v % self.p ** prec

    def __repr__(self):
        if self.is_zero:
            return f"O({self.p}^{self.v if self.v < INF else 'oo'})"
        return f"{self.u}*{self.p}^{self.v} + O({self.p}^{self.floor()})"


def teichmuller(a: int, p: int, N: int) -> int:
    """The (p-1)-st root of unity congruent to a mod p, as an int mod p^N."""
    if a % p == 0:
        raise NotAUnit("Teichmuller lift needs a unit")
    # x -> x^p gains one digit of agreement with the lift per step
    x = a % p ** N
    for _ in range(N):
        x = pow(x, p, p ** N)
    return x


class QuadScalar:
    """Element p^{-e} (u0 + u1 t) of the quadratic ring Z[t]/(t^2 - a t + p)
    at fixed modulus p^M.  Supersingular root arithmetic: alpha = t,
    beta = a - t.  Inversion of t is exact: t^{-1} = (a - t)/p.
    """

    __slots__ = ("p", "a", "M", "e", "u0", "u1")

    def __init__(self, p, a, M, u0, u1, e=0):
        self.p, self.a, self.M = p, a, M
        mod = p ** M
        self.u0, self.u1, self.e = u0 % mod, u1 % mod, e
        self._normalize()

    def _normalize(self):
        # strip common p factors from the numerator into the denominator
        p, mod = self.p, self.p ** self.M
        while self.e > 0 and self.u0 % p == 0 and self.u1 % p == 0 \
                and (self.u0 or self.u1):
            self.u0 //= p
            self.u1 //= p
            self.e -= 1
        self.u0 %= mod
        self.u1 %= mod

    @classmethod
    def from_scalar(cls, q, p, a, M):
        q = Fraction(q)
        vd = vp(q.denominator, p)
        den = q.denominator // p ** vd
        u0 = q.numerator * pow(den, -1, p ** M) % p ** M
        return cls(p, a, M, u0, 0, e=vd)

    def same_ring(self, other):
        return (self.p, self.a, self.M) == (other.p, other.a, other.M)

    def _c(self, other):
        if isinstance(other, QuadScalar):
            if not self.same_ring(other):
                raise ValueError("mixed quadratic rings")
            return other
        return QuadScalar.from_scalar(other, self.p, self.a, self.M)

    def __add__(self, other):
        other = self._c(other)
        e = max(self.e, other.e)
        s1 = self.p ** (e - self.e)
        s2 = self.p ** (e - other.e)
        return QuadScalar(self.p, self.a, self.M,
                          self.u0 * s1 + other.u0 * s2,
                          self.u1 * s1 + other.u1 * s2, e)

    def __neg__(self):
        return QuadScalar(self.p, self.a, self.M, -self.u0, -self.u1, self.e)

    def __sub__(self, other):
        return self + (-self._c(other))

    def __mul__(self, other):
        other = self._c(other)
        # (u0 + u1 t)(w0 + w1 t), t^2 = a t - p
        u0, u1, w0, w1 = self.u0, self.u1, other.u0, other.u1
        c0 = u0 * w0 - self.p * u1 * w1
        c1 = u0 * w1 + u1 * w0 + self.a * u1 * w1
        return QuadScalar(self.p, self.a, self.M, c0, c1, self.e + other.e)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return self._c(other) - self

    def conj(self):
        """Nontrivial ring automorphism t -> a - t."""
        return QuadScalar(self.p, self.a, self.M,
                          self.u0 + self.a * self.u1, -self.u1, self.e)

    def t_inverse_times(self):
        """self * t^{-1}, exact (t^{-1} = (a - t)/p)."""
        c0 = self.u0 * self.a + self.u1 * self.p
        c1 = -self.u0
        return QuadScalar(self.p, self.a, self.M, c0, c1, self.e + 1)

    def divide(self, other):
        """self / other via other's conjugate; precision cost = v_p(N(other))."""
        other = self._c(other)
        num = self * other.conj()
        n = (other.u0 * other.u0 + other.a * other.u0 * other.u1
             + other.p * other.u1 * other.u1) % self.p ** self.M
        if n == 0:
            raise ZeroDivisionError("norm vanishes at working modulus")
        v = vp(n, self.p)
        unit_inv = pow(n // self.p ** v, -1, self.p ** self.M)
        out = QuadScalar(self.p, self.a, self.M, num.u0 * unit_inv,
                         num.u1 * unit_inv, num.e + v - 2 * other.e)
        return out

    def scalar_part(self):
        """(rational part, t part) as (u0, u1, e) after normalization."""
        return self.u0, self.u1, self.e

    def residual_valuation(self):
        """min valuation of the two coordinates, minus the denominator
        exponent; M - e when both vanish at the working modulus."""
        if self.u0 == 0 and self.u1 == 0:
            return self.M - self.e
        return min(vp(self.u0, self.p), vp(self.u1, self.p)) - self.e

    def t_part_valuation(self):
        """Valuation of the coefficient of t (with denominator), INF if zero."""
        return vp(self.u1, self.p) - self.e if self.u1 else INF

    def rational_residual(self):
        """If the t-part vanishes, the u0-part as a PadicScalar; else raise."""
        if self.u1 != 0:
            raise ValueError("element has a nonzero t-part at working modulus")
        s = PadicScalar.from_int(self.u0, self.p, self.M)
        return s * PadicScalar.from_fraction(Fraction(1, self.p ** self.e),
                                             self.p, self.M)

    def __eq__(self, other):
        other = self._c(other)
        d = self - other
        return d.u0 == 0 and d.u1 == 0

    def __repr__(self):
        s = f"({self.u0} + {self.u1}*t)"
        return s + (f"/p^{self.e}" if self.e else "")


def alpha_beta(p, a_p, M):
    """The two allowable roots (t, a_p - t) in the quadratic ring mod p^M."""
    al = QuadScalar(p, a_p, M, 0, 1)
    be = QuadScalar(p, a_p, M, a_p, -1)
    return al, be


# ---------------------------------------------------------------------------
# cyclotomic semilocal rings


def _phi(n):
    out, m = 1, n
    d = 2
    while d * d <= m:
        if m % d == 0:
            out *= d - 1
            m //= d
            while m % d == 0:
                out *= d
                m //= d
        d += 1
    if m > 1:
        out *= m - 1
    return out


def _factor(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


_RING_CACHE: dict = {}


class CycloRing:
    """(Z/p^N)[mu_c] tensor (Z/p^N)[mu_{p^k}], p coprime to c, semilocal.

    The x-leg is stored as a tensor over the prime powers l^e || c; the
    basis of each leg is 1, z, ..., z^{phi(l^e)-1} and reduction uses
    Phi_{l^e}(z) = sum_{s<l} z^{s l^{e-1}}.  k = 0 means no y-leg.
    """

    def __init__(self, p, N, c, k):
        if c % p == 0:
            raise ValueError("c must be prime to p")
        if k < 0:
            raise ValueError("k must be nonnegative")
        self.p, self.N, self.c, self.k = p, N, c, k
        self.mod = p ** N
        self.factors = _factor(c)  # [(l, e)]
        self.sizes = [l ** e for l, e in self.factors]
        self.degs = [_phi(l ** e) for l, e in self.factors]
        self.ydeg = _phi(p ** k) if k else 1
        self.dim = math.prod(self.degs) * self.ydeg
        if p == 2 or not all(p % q for q, _ in self.factors):
            raise ValueError("p must be odd and prime to c")
        # exact orders of the leg generators hold structurally: z^{l^{e-1}}
        # reduces to a basis monomial (l odd) or to -1 (l = 2), never to 1,
        # and z^{l^e} = 1 by the circle representation; same for the y-leg
        if k:
            assert self.ydeg == p ** (k - 1) * (p - 1)

    @classmethod
    def get(cls, p, N, c, k):
        key = (p, N, c, k)
        if key not in _RING_CACHE:
            _RING_CACHE[key] = cls(p, N, c, k)
        return _RING_CACHE[key]

    # -- element constructors ------------------------------------------------

    def zero(self):
        return CycloElem(self, {}, 0)

    def one(self):
        return self.monomial(tuple(0 for _ in self.factors), 0)

    def monomial(self, xexps, yexp, coeff=1, denom_exp=0):
        xexps = tuple(e % s for e, s in zip(xexps, self.sizes))
        return CycloElem(self, {(xexps, yexp % (self.p ** self.k if self.k else 1)):
                                coeff % self.mod}, denom_exp)

    def zeta_c(self, power=1):
        """zeta_c^power as an element (zeta_c = product of the leg generators)."""
        return self.monomial(tuple(power for _ in self.factors), 0)

    def zeta_pk(self, power=1):
        if self.k == 0:
            raise ValueError("ring has no y-leg")
        return self.monomial(tuple(0 for _ in self.factors), power)

    def zeta_M(self, power=1):
        """zeta_{c p^k}^power (full-level root of unity)."""
        if self.k == 0:
            return self.zeta_c(power)
        return self.monomial(tuple(power % s for s in self.sizes), power)

    def zeta_level(self, Mp, power=1):
        """Coherent root of unity zeta_{Mp}^power for Mp | c p^k.

        Coherent means zeta_{M}^{M/M'} = zeta_{M'} across all levels, like
        exp(2 pi i / M): per prime leg the exponent is the CRT coefficient
        l^{e - e'} (Mp / l^{e'})^{-1} mod l^{e'}.
        """
        M = self.c * self.p ** self.k
        if Mp <= 0 or M % Mp:
            raise ValueError("level must divide c p^k")
        parts = dict(_factor(Mp))
        xexps = []
        for (l, e) in self.factors:
            e2 = parts.get(l, 0)
            if e2 == 0:
                xexps.append(0)
            else:
                inv = pow(Mp // l ** e2, -1, l ** e2)
                xexps.append(l ** (e - e2) * inv % l ** e)
        kp = parts.get(self.p, 0)
        if kp:
            inv = pow(Mp // self.p ** kp, -1, self.p ** kp)
            yexp = self.p ** (self.k - kp) * inv % self.p ** self.k
        else:
            yexp = 0
        return self.monomial(tuple(x * power % s for x, s in
                                   zip(xexps, self.sizes)),
                             yexp * power)

    def from_scalar(self, s):
        if isinstance(s, PadicScalar):
            e = max(-s.v, 0)
            if s.is_zero:
                return self.zero()
            c = s.u * self.p ** max(s.v, 0)
            return CycloElem(self, {(tuple(0 for _ in self.factors), 0):
                                    c % self.mod}, e)
        q = Fraction(s)
        e = vp(q.denominator, self.p)
        den = q.denominator // self.p ** e
        c = q.numerator * pow(den, -1, self.mod) % self.mod
        out = CycloElem(self, {(tuple(0 for _ in self.factors), 0): c}, e)
        return out

    # -- per-leg reduction tables ---------------------------------------------

    def _reduce_leg(self, idx, e):
        """Reduction of z^e (0 <= e < l^k) to basis monomials: [(exp, sign)]."""
        l, k = self.factors[idx]
        deg = self.degs[idx]
        if e < deg:
            return [(e, 1)]
        r = e - deg  # 0 <= r < l^{k-1}
        step = l ** (k - 1)
        return [(s * step + r, -1) for s in range(l - 1)]

    def _reduce_y(self, f):
        if self.k == 0:
            return [(0, 1)]
        if f < self.ydeg:
            return [(f, 1)]
        r = f - self.ydeg
        step = self.p ** (self.k - 1)
        return [(s * step + r, -1) for s in range(self.p - 1)]


class CycloElem:
    """p^{-denom_exp} * (sum of circle monomials) in a CycloRing.

    ``terms`` maps (xexps tuple, yexp) -> coefficient mod p^N with exponents
    in the full circle ranges (0..l^e-1 and 0..p^k-1); reduction to the
    monomial basis happens lazily in reduce().
    """

    __slots__ = ("ring", "terms", "denom_exp")

    def __init__(self, ring, terms, denom_exp=0):
        self.ring = ring
        self.terms = {k: v % ring.mod for k, v in terms.items() if v % ring.mod}
        self.denom_exp = denom_exp

    # -- ring structure -------------------------------------------------------

    def _align(self, other):
        if isinstance(other, (int, Fraction, PadicScalar)):
            other = self.ring.from_scalar(other)
        if other.ring is not self.ring:
            raise ValueError("elements of different rings")
        e = max(self.denom_exp, other.denom_exp)
        return other, e

    def _scaled_terms(self, e):
        s = self.ring.p ** (e - self.denom_exp)
        if s == 1:
            return dict(self.terms)
        return {k: v * s % self.ring.mod for k, v in self.terms.items()}

    def __add__(self, other):
        other, e = self._align(other)
        out = self._scaled_terms(e)
        for k, v in other._scaled_terms(e).items():
            out[k] = (out.get(k, 0) + v) % self.ring.mod
        return CycloElem(self.ring, out, e)

    def __neg__(self):
        return CycloElem(self.ring, {k: -v for k, v in self.terms.items()},
                         self.denom_exp)

    def __sub__(self, other):
        other, _ = self._align(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PadicScalar)):
            return self._scalar_mul(other)
        other, _ = self._align(other)
        ring = self.ring
        ymod = ring.p ** ring.k if ring.k else 1
        out = {}
        for (xa, ya), u in self.terms.items():
            for (xb, yb), w in other.terms.items():
                key = (tuple((a + b) % s for a, b, s in zip(xa, xb, ring.sizes)),
                       (ya + yb) % ymod)
                out[key] = (out.get(key, 0) + u * w) % ring.mod
        return CycloElem(ring, out, self.denom_exp + other.denom_exp)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        other, _ = self._align(other)
        return other - self

    def _scalar_mul(self, s):
        if isinstance(s, PadicScalar):
            if s.is_zero:
                return self.ring.zero()
            e = max(-s.v, 0)
            c = s.u * self.ring.p ** max(s.v, 0)
            return CycloElem(self.ring,
                             {k: v * c for k, v in self.terms.items()},
                             self.denom_exp + e)
        q = Fraction(s)
        if q == 0:
            return self.ring.zero()
        e = vp(q.denominator, self.ring.p)
        den = q.denominator // self.ring.p ** e
        c = q.numerator * pow(den, -1, self.ring.mod)
        return CycloElem(self.ring, {k: v * c for k, v in self.terms.items()},
                         self.denom_exp + e)

    # -- canonical form and precision ------------------------------------------

    def reduce(self):
        """Canonical coefficients on the monomial basis: dict key -> coeff."""
        ring = self.ring
        out = {}
        for (xe, ye), coeff in self.terms.items():
            legs = [ring._reduce_leg(i, e) for i, e in enumerate(xe)]
            legs.append(ring._reduce_y(ye))
            for combo in itertools.product(*legs):
                sign = 1
                for _, s in combo:
                    sign *= s
                key = (tuple(c[0] for c in combo[:-1]), combo[-1][0])
                out[key] = (out.get(key, 0) + sign * coeff) % ring.mod
        return {k: v for k, v in out.items() if v}

    def reduced(self):
        return CycloElem(self.ring, self.reduce(), self.denom_exp)

    def tracked_precision(self):
        """Absolute precision exponent guaranteed for this element."""
        return self.ring.N - self.denom_exp

    def residual_valuation(self):
        """min_p-valuation of the canonical form minus denom_exp; when all
        coefficients vanish mod p^N this returns tracked_precision() (a floor,
        not an exact valuation)."""
        red = self.reduce()
        if not red:
            return self.tracked_precision()
        v = min(vp(c, self.ring.p) for c in red.values())
        return v - self.denom_exp

    def is_zero_at_precision(self):
        return not self.reduce()

    def coeff_of_one(self):
        """Canonical coefficient of the basis monomial 1, as a PadicScalar."""
        red = self.reduce()
        key = (tuple(0 for _ in self.ring.factors), 0)
        c = red.get(key, 0)
        s = PadicScalar.from_int(c, self.ring.p, self.ring.N) if c else \
            PadicScalar(self.ring.p, self.ring.N, 0, 0)
        return s * PadicScalar.from_fraction(
            Fraction(1, self.ring.p ** self.denom_exp), self.ring.p, self.ring.N)

    # -- Galois structure -------------------------------------------------------

    def frobenius(self, power=1):
        """x -> x^{p^power} on the unramified leg, y fixed."""
        ring = self.ring
        mults = []
        for l, e in ring.factors:
            le = l ** e
            m = pow(ring.p, power, le) if power >= 0 else \
                pow(pow(ring.p, -1, le), -power, le)
            mults.append(m)
        out = {}
        for (xe, ye), coeff in self.terms.items():
            key = (tuple(a * m % s for a, m, s in zip(xe, mults, ring.sizes)), ye)
            out[key] = (out.get(key, 0) + coeff) % ring.mod
        return CycloElem(ring, out, self.denom_exp)

    def galois_act(self, a):
        """sigma_a: x -> x^a, y -> y^a for a unit mod c p^k."""
        ring = self.ring
        M = ring.c * ring.p ** ring.k
        if math.gcd(a, M) != 1:
            raise NotAUnit(f"{a} is not a unit mod {M}")
        ymod = ring.p ** ring.k if ring.k else 1
        out = {}
        for (xe, ye), coeff in self.terms.items():
            key = (tuple(e * a % s for e, s in zip(xe, ring.sizes)),
                   ye * a % ymod if ring.k else 0)
            out[key] = (out.get(key, 0) + coeff) % ring.mod
        return CycloElem(ring, out, self.denom_exp)

    def _galois_parts(self, xmults, ymult):
        ring = self.ring
        ymod = ring.p ** ring.k if ring.k else 1
        out = {}
        for (xe, ye), coeff in self.terms.items():
            key = (tuple(e * m % s for e, m, s in zip(xe, xmults, ring.sizes)),
                   ye * ymult % ymod if ring.k else 0)
            out[key] = (out.get(key, 0) + coeff) % ring.mod
        return out

    # -- traces -------------------------------------------------------------------

    def trace_y(self, k_new):
        """Trace from level k to level k_new of the ramified leg."""
        ring = self.ring
        if not 0 <= k_new <= ring.k:
            raise ValueError("target level out of range")
        if k_new == ring.k:
            return self
        p, k = ring.p, ring.k
        if k_new == 0:
            reps = [b for b in range(1, p ** k) if b % p]
        else:
            reps = [1 + t * p ** k_new for t in range(p ** (k - k_new))]
            reps = [b for b in reps if b % p]
        acc = {}
        ident = tuple(1 for _ in ring.factors)
        for b in reps:
            part = self._galois_parts(ident, b)
            for key, v in part.items():
                acc[key] = (acc.get(key, 0) + v) % ring.mod
        summed = CycloElem(ring, acc, self.denom_exp)
        return summed._descend(ring.c, k_new)

    def trace_x(self, c_new):
        """Trace from Q_p(mu_c) down to Q_p(mu_c_new) (y fixed)."""
        ring = self.ring
        if ring.c % c_new:
            raise ValueError("target conductor must divide c")
        if c_new == ring.c:
            return self
        per_leg = []
        new_exps = dict(_factor(c_new))
        for (l, e) in ring.factors:
            e2 = new_exps.get(l, 0)
            le = l ** e
            if e2 == e:
                per_leg.append([1])
            else:
                sub = l ** e2
                ker = [a for a in range(1, le + 1) if a % l and
                       (a % sub == 1 % sub)]
                per_leg.append(ker)
        acc = {}
        for combo in itertools.product(*per_leg):
            part = self._galois_parts(combo, 1)
            for key, v in part.items():
                acc[key] = (acc.get(key, 0) + v) % ring.mod
        summed = CycloElem(ring, acc, self.denom_exp)
        return summed._descend(c_new, ring.k)

    def _descend(self, c_new, k_new):
        """Express an element known to lie in the (c_new, k_new) subring there.

        Raises NotInSubring when a canonical coordinate outside the subring
        basis is nonzero at tracked precision.
        """
        ring = self.ring
        sub = CycloRing.get(ring.p, ring.N, c_new, k_new)
        red = self.reduce()
        new_exps = dict(_factor(c_new))
        scales = []
        for (l, e) in ring.factors:
            e2 = new_exps.get(l, 0)
            scales.append(l ** (e - e2) if e2 else None)  # None: leg dropped
        ystep = ring.p ** (ring.k - k_new) if k_new else None
        out = {}
        for (xe, ye), coeff in red.items():
            nx = []
            for exp, sc in zip(xe, scales):
                if sc is None:
                    if exp != 0:
                        raise NotInSubring("x-leg coordinate survives")
                elif exp % sc:
                    raise NotInSubring("x-exponent not aligned with subring")
                else:
                    nx.append(exp // sc)
            if ring.k and k_new == 0:
                if ye != 0:
                    raise NotInSubring("y-coordinate survives")
                ny = 0
            elif ring.k:
                if ye % ystep:
                    raise NotInSubring("y-exponent not aligned with subring")
                ny = ye // ystep
            else:
                ny = 0
            out[(tuple(nx), ny)] = coeff
        return CycloElem(sub, out, self.denom_exp)

    def include_into(self, big: "CycloRing"):
        """Image under mu_{c p^k} -> mu_{C P^K} for c | C, k <= K."""
        ring = self.ring
        if big.c % ring.c or big.k < ring.k:
            raise ValueError("not a subring of the target")
        big_exps = {}
        for i, (l, e) in enumerate(big.factors):
            big_exps[l] = (i, e)
        ystep = big.p ** (big.k - ring.k)
        out = {}
        for (xe, ye), coeff in self.terms.items():
            nx = [0] * len(big.factors)
            for (l, e), exp in zip(ring.factors, xe):
                i, E = big_exps[l]
                nx[i] = exp * l ** (E - e) % big.sizes[i]
            ny = ye * ystep % (big.p ** big.k) if big.k else 0
            key = (tuple(nx), ny)
            out[key] = (out.get(key, 0) + coeff) % big.mod
        return CycloElem(big, out, self.denom_exp)

    def __repr__(self):
        n = len(self.terms)
        return (f"<CycloElem c={self.ring.c} k={self.ring.k} "
                f"{n} term(s), denom p^{self.denom_exp}>")


# ---------------------------------------------------------------------------
# phi-linear solves on orbit spans


def _orbit_span(ring, elems):
    """Frobenius orbit closure of the circle monomials supporting elems."""
    seen = []
    stack = []
    for e in elems:
        for key in e.terms:
            if key not in seen:
                seen.append(key)
                stack.append(key)
    mults = []
    for l, e in ring.factors:
        mults.append(ring.p % (l ** e))
    ymod = ring.p ** ring.k if ring.k else 1
    while stack:
        xe, ye = stack.pop()
        nxt = (tuple(a * m % s for a, m, s in zip(xe, mults, ring.sizes)), ye)
        if nxt not in seen:
            seen.append(nxt)
            stack.append(nxt)
    return seen


def _gauss_solve(A, b, p, N):
    """Solve A x = b over Z/p^N, requiring unit pivots (else raise)."""
    mod = p ** N
    n = len(A)
    M = [row[:] + [bv] for row, bv in zip(A, b)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if M[i][c] % p), None)
        if piv is None:
            raise SingularOperator("no unit pivot; operator not invertible")
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, mod)
        M[r] = [v * inv % mod for v in M[r]]
        for i in range(n):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(vi - f * vr) % mod for vi, vr in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
    x = [0] * n
    for row, c in enumerate(piv_cols):
        x[c] = M[row][n]
    return x


def _phi_key(ring, key, power=1):
    mults = []
    for l, e in ring.factors:
        le = l ** e
        m = pow(ring.p, power, le) if power >= 0 else \
            pow(pow(ring.p, -1, le), -power, le)
        mults.append(m)
    xe, ye = key
    return (tuple(a * m % s for a, m, s in zip(xe, mults, ring.sizes)), ye)


def solve_phi_quadratic(ring: CycloRing, a_p: int, rhs: CycloElem) -> CycloElem:
    """Unique eta with eta^{phi^2} - a_p eta^{phi} + p eta = rhs, for p | a_p.

    rhs must have trivial y-part; the solve runs on the Frobenius orbit
    span of its monomials, where the operator reduces to phi^2 mod p and is
    therefore invertible.
    """
    if any(ye != 0 for (_, ye) in rhs.terms):
        raise ValueError("rhs must live in the unramified leg")
    basis = _orbit_span(ring, [rhs])
    idx = {k: i for i, k in enumerate(basis)}
    n = len(basis)
    mod = ring.mod
    A = [[0] * n for _ in range(n)]
    for j, key in enumerate(basis):
        A[idx[_phi_key(ring, key, 2)]][j] = (A[idx[_phi_key(ring, key, 2)]][j] + 1) % mod
        i1 = idx[_phi_key(ring, key, 1)]
        A[i1][j] = (A[i1][j] - a_p) % mod
        A[idx[key]][j] = (A[idx[key]][j] + ring.p) % mod
    b = [0] * n
    for key, v in rhs.terms.items():
        b[idx[key]] = v
    try:
        x = _gauss_solve(A, b, ring.p, ring.N)
    except SingularOperator as exc:
        raise SingularOperator(f"quadratic phi-solve singular: {exc}") from exc
    return CycloElem(ring, {basis[i]: x[i] for i in range(n)}, rhs.denom_exp)


def solve_phi_linear(ring: CycloRing, coeff, rhs: CycloElem) -> CycloElem:
    """Unique u with u^{phi} - coeff * u = rhs (coeff a PadicScalar/int).

    Non-invertibility (the anomalous case: coeff^h = 1 mod p on some orbit)
    raises NonInvertibleOperator with the failing witness.
    """
    if any(ye != 0 for (_, ye) in rhs.terms):
        raise ValueError("rhs must live in the unramified leg")
    if isinstance(coeff, PadicScalar):
        if coeff.v < 0:
            raise ValueError("coefficient must be integral")
        cint = coeff.lift(ring.N)
    else:
        cint = int(coeff) % ring.mod
    basis = _orbit_span(ring, [rhs])
    idx = {k: i for i, k in enumerate(basis)}
    n = len(basis)
    A = [[0] * n for _ in range(n)]
    for j, key in enumerate(basis):
        i1 = idx[_phi_key(ring, key, 1)]
        A[i1][j] = (A[i1][j] + 1) % ring.mod
        A[idx[key]][j] = (A[idx[key]][j] - cint) % ring.mod
    b = [0] * n
    for key, v in rhs.terms.items():
        b[idx[key]] = v
    try:
        x = _gauss_solve(A, b, ring.p, ring.N)
    except SingularOperator as exc:
        raise NonInvertibleOperator(
            f"phi-linear solve not invertible (anomalous case: "
            f"coeff^h = 1 mod {ring.p} on an orbit)") from exc
    return CycloElem(ring, {basis[i]: x[i] for i in range(n)}, rhs.denom_exp)


# ---------------------------------------------------------------------------
# formal-group logarithm


def formal_log(E, degree: int) -> list:
    """Coefficients (a_1..a_degree), log(t) = sum a_j t^j / j, for the formal
    group of the Weierstrass model in the parameter t = x/y.

    The a_j are integers in Z[a1..a6]; a_1 = 1 and a_2 = -a1.
    """
    if degree < 1:
        raise ValueError("degree must be positive")
    D = degree + 4
    a1, a2, a3, a4, a6 = E.a1, E.a2, E.a3, E.a4, E.a6

    def mul(f, g):
        out = [0] * D
        for i, fi in enumerate(f):
            if fi:
                for j, gj in enumerate(g):
                    if gj and i + j < D:
                        out[i + j] += fi * gj
        return out

    # w(t) = t^3 + a2 t^2 w + a4 t w^2 + a6 w^3 - a1 t w - a3 w^2
    w = [0] * D
    if D > 3:
        w[3] = 1
    for _ in range(D):
        w2 = mul(w, w)
        w3 = mul(w2, w)
        new = [0] * D
        new[3] = 1
        for i in range(D):
            if i + 2 < D:
                new[i + 2] += a2 * w[i]
            if i + 1 < D:
                new[i + 1] += a4 * w2[i] - a1 * w[i]
            new[i] += a6 * w3[i] - a3 * w2[i]
        if new == w:
            break
        w = new
    # omega/dt = (w - t w')/(w (2 + a1 t + a3 w)); both sides divisible by t^3
    wp = [(i + 1) * w[i + 1] for i in range(D - 1)] + [0]
    num = [w[i] - (wp[i - 1] if i else 0) for i in range(D)]
    den = mul(w, [2, a1] + [0] * (D - 2))
    den = [den[i] + a3 * mul(w, w)[i] for i in range(D)]
    num, den = num[3:], den[3:]
    # series division in Q, then normalize leading coefficient to 1
    q = [Fraction(0)] * (D - 3)
    inv0 = Fraction(1, den[0])
    for i in range(D - 3):
        acc = Fraction(num[i])
        for j in range(1, i + 1):
            acc -= q[i - j] * den[j]
        q[i] = acc * inv0
    lead = q[0]
    q = [c / lead for c in q]
    out = []
    for j in range(1, degree + 1):
        c = q[j - 1]
        if c.denominator != 1:
            raise IntegralityFailure(f"log coefficient a_{j} = {c} not integral")
        out.append(int(c))
    return out
