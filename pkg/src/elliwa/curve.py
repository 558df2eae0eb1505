"""Elliptic curve data: point counts, Frobenius traces, prime classification.

A curve is a minimal Weierstrass model with a supplied conductor.  Everything
downstream consumes traces of Frobenius a_l, the classification of the working
prime p (ordinary / supersingular with a_p = 0 / supersingular with p | a_p),
and the allowable roots of t^2 - a_p t + p.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
import sympy

try:
    import tomllib as _toml
except ImportError:
    import tomli as _toml

COUNT_BOUND = 10 ** 6


class BadReduction(ValueError):
    """Point count requested at a prime dividing the conductor."""


class BoundExceeded(ValueError):
    """Prime above the enumeration bound with no table entry."""


class HasseViolation(ValueError):
    """Supplied trace violates |a_l| <= 2 sqrt(l)."""


class NotOrdinary(ValueError):
    """Ordinary-only operation called at a supersingular prime."""


class AmbiguousSign(ArithmeticError):
    """Functional-equation sign test failed to separate +1 from -1."""


@dataclass
class CurveData:
    """Minimal Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.

    The conductor is an input; bad-prime traces (+1 split, -1 nonsplit,
    0 additive) come from the table or the ``bad_al`` map, never from
    reduction-type analysis.
    """

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    conductor: int
    label: str = ""
    al_cache: dict = field(default_factory=dict)
    w_cache: int | None = None

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError("singular model")
        if self.conductor <= 0:
            raise ValueError("conductor must be positive")
        for l, a in self.al_cache.items():
            if self.conductor % l and a * a > 4 * l:
                raise HasseViolation(f"a_{l} = {a} exceeds the Hasse bound")

    @property
    def b2(self):
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self):
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self):
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self):
        return (self.a1 * self.a1 * self.a6 + 4 * self.a2 * self.a6
                - self.a1 * self.a3 * self.a4 + self.a2 * self.a3 * self.a3
                - self.a4 * self.a4)

    @property
    def c4(self):
        return self.b2 * self.b2 - 24 * self.b4

    @property
    def c6(self):
        return -self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self):
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def rhs_cubic(self):
        """Coefficients of the completed square 4x^3 + b2 x^2 + 2 b4 x + b6."""
        return 4, self.b2, 2 * self.b4, self.b6


def from_toml(path) -> CurveData:
    """Load a curve from TOML: [curve] a = [a1,a2,a3,a4,a6]; conductor; label.

    An optional [curve.bad_al] table maps bad primes (string keys) to their
    conventional traces.
    """
    with open(path, "rb") as fh:
        data = _toml.load(fh)
    cur = data["curve"]
    a = cur["a"]
    if len(a) != 5:
        raise ValueError("curve.a must have five entries")
    bad = {int(l): int(v) for l, v in cur.get("bad_al", {}).items()}
    E = CurveData(*[int(c) for c in a], conductor=int(cur["conductor"]),
                  label=cur.get("label", ""), al_cache=bad)
    for l in bad:
        if E.conductor % l:
            raise ValueError(f"bad_al entry at good prime {l}")
    return E


def load_al_table(path) -> dict:
    """Read a headerless CSV of lines ``l,a_l`` into a dict."""
    table = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            l, a = int(row[0]), int(row[1])
            table[l] = a
    return table


def count_points(E: CurveData, l: int, bad_kind: str | None = None) -> int:
    """Trace of Frobenius a_l = (1 + l) - #E(F_l) for a good prime l.

    For l | N the value must come from the cache or from ``bad_kind`` in
    {"split", "nonsplit", "additive"} mapping to +1, -1, 0.
    """
    if E.conductor % l == 0:
        if bad_kind is not None:
            a = {"split": 1, "nonsplit": -1, "additive": 0}[bad_kind]
            if E.al_cache.get(l, a) != a:
                raise ValueError(f"conflicting reduction kind for l = {l}")
            E.al_cache[l] = a
            return a
        if l in E.al_cache:
            return E.al_cache[l]
        raise BadReduction(f"l = {l} divides the conductor; supply a_l")
    if l in E.al_cache:
        return E.al_cache[l]
    if l > COUNT_BOUND:
        raise BoundExceeded(f"l = {l} above enumeration bound")
    if l == 2:
        n = 1
        for x in range(2):
            for y in range(2):
                lhs = (y * y + E.a1 * x * y + E.a3 * y) % 2
                rhs = (x ** 3 + E.a2 * x * x + E.a4 * x + E.a6) % 2
                n += lhs == rhs
        a = 3 - n
    else:
        # one x-fiber has 1 + chi(g(x)) points on (2y + a1 x + a3)^2 = g(x)
        x = np.arange(l, dtype=np.int64)
        g = (4 * x % l) * x % l * x % l
        g = (g + (E.b2 % l) * x % l * x) % l
        g = (g + (2 * E.b4 % l) * x + E.b6) % l
        is_sq = np.zeros(l, dtype=np.int8)
        is_sq[x * x % l] = 1
        chi = np.where(g == 0, 0, np.where(is_sq[g] == 1, 1, -1))
        a = -int(chi.sum())
    if a * a > 4 * l:
        raise HasseViolation(f"counted a_{l} = {a} fails Hasse")
    E.al_cache[l] = a
    return a


def an_list(E: CurveData, n_max: int) -> list:
    """[a_0 .. a_n_max] with a_0 = 0, by Hecke recursion and multiplicativity.

    a_{l^{k+1}} = a_l a_{l^k} - l [l good] a_{l^{k-1}};  a_{mn} = a_m a_n.
    """
    an = [0] * (n_max + 1)
    if n_max >= 1:
        an[1] = 1
    spf = np.zeros(n_max + 1, dtype=np.int64)
    for l in range(2, n_max + 1):
        if spf[l] == 0:
            spf[l::l] = np.where(spf[l::l] == 0, l, spf[l::l])
    for n in range(2, n_max + 1):
        l = int(spf[n])
        k, m = 1, n // l
        while m % l == 0:
            k, m = k + 1, m // l
        if m > 1:
            an[n] = an[n // m] * an[m]
            continue
        a_l = count_points(E, l)
        if k == 1:
            an[n] = a_l
        else:
            good = l if E.conductor % l else 0
            an[n] = a_l * an[l ** (k - 1)] - good * an[l ** (k - 2)]
    return an


PLAIN = "plain"
BULLETS_SS = frozenset({"plus", "minus", "sharp", "flat"})


@dataclass(frozen=True)
class PrimeClass:
    """Classification of an odd good prime for decomposition purposes.

    ``bullets`` lists the decomposition flavors available: {"plain"} when
    p does not divide a_p, else {"plus","minus","sharp","flat"}.  When
    a_p = 0 the sharp/flat pair coincides with (minus, plus), in that order.
    """

    p: int
    a_p: int
    kind: str  # ordinary | supersingular_zero | supersingular_nonzero
    bullets: frozenset

    @property
    def sharp_flat_as_pm(self):
        return ("minus", "plus") if self.a_p == 0 else None


def classify(E: CurveData, p: int, a_p: int | None = None) -> PrimeClass:
    """Classify the odd prime p (requires p good for E)."""
    if p == 2 or not sympy.isprime(p):
        raise ValueError("p must be an odd prime")
    if E.conductor % p == 0:
        raise BadReduction(f"p = {p} divides the conductor")
    if a_p is None:
        a_p = count_points(E, p)
    elif a_p * a_p > 4 * p:
        raise HasseViolation(f"a_{p} = {a_p} exceeds the Hasse bound")
    if a_p % p:
        return PrimeClass(p, a_p, "ordinary", frozenset({PLAIN}))
    if a_p == 0:
        return PrimeClass(p, a_p, "supersingular_zero", BULLETS_SS)
    # |a_p| <= 2 sqrt(p) and p | a_p != 0 force p = 3, a_p = +-3
    return PrimeClass(p, a_p, "supersingular_nonzero", BULLETS_SS)


@dataclass(frozen=True)
class AllowableRoot:
    """Root data for t^2 - a_p t + p with ord_p(alpha) < 1.

    Ordinary: alpha is the unit root as an integer mod p^N and beta = a_p -
    alpha (so alpha beta = p mod p^N).  Supersingular: alpha is the formal
    generator t of Z_p[t]/(t^2 - a_p t + p) and beta its conjugate a_p - t;
    no residue data is stored, arithmetic happens in the quadratic ring.
    """

    p: int
    a_p: int
    precision: int
    kind: str
    alpha_unit: int | None = None  # ordinary only

    @property
    def beta_unit(self):
        if self.alpha_unit is None:
            return None
        return (self.a_p - self.alpha_unit) % self.p ** self.precision


def allowable_roots(p: int, a_p: int, N: int) -> AllowableRoot:
    """Allowable root of t^2 - a_p t + p at precision p^N."""
    if N < 1:
        raise ValueError("precision must be at least 1")
    if a_p % p:
        # Newton iteration from the unit residue a_p mod p
        pN = p ** N
        x = a_p % p
        while True:
            f = (x * x - a_p * x + p) % pN
            if f == 0:
                break
            d = (2 * x - a_p) % pN
            x = (x - f * pow(d, -1, pN)) % pN
        return AllowableRoot(p, a_p, N, "ordinary", alpha_unit=x)
    return AllowableRoot(p, a_p, N, "supersingular")


def nonanomalous(E: CurveData, p: int, m: int) -> bool:
    """Whether a_p^{h_m} is not 1 mod p, h_m the order of p in (Z/m)^*."""
    a_p = count_points(E, p)
    if a_p % p == 0:
        raise NotOrdinary("nonanomalous test applies to ordinary primes")
    if m % p == 0 or math.gcd(m, p) != 1:
        raise ValueError("m must be prime to p")
    h_m = 1 if m == 1 else sympy.n_order(p, m)
    return pow(a_p, h_m, p) != 1 % p


def fricke_sign(E: CurveData, bits: int = 64) -> int:
    """Sign w of the functional equation, from the weight-2 symmetry
    S(1/y) = w y^2 S(y) of S(y) = sum a_n exp(-2 pi n y / sqrt(N)).

    The sign is accepted only if it fits at two separated y values within
    1e-8 relative tolerance; otherwise AmbiguousSign.
    """
    if E.w_cache is not None:
        return E.w_cache
    import mpmath as mp

    with mp.workprec(max(bits, 64)):
        sqN = mp.sqrt(E.conductor)
        y_low = 1 / mp.mpf("1.3")
        cut = int(mp.ceil(max(50 * sqN, (bits + 40) * mp.log(2) * sqN
                               / (2 * mp.pi * y_low))))
        an = an_list(E, cut)

        def S(y):
            t = mp.exp(-2 * mp.pi * y / sqN)
            q, acc = mp.mpf(1), mp.mpf(0)
            for n in range(1, cut + 1):
                q *= t
                if an[n]:
                    acc += an[n] * q
            return acc

        votes = []
        for ystr in ("1.1", "1.3"):
            y = mp.mpf(ystr)
            lhs, rhs = S(1 / y), y * y * S(y)
            scale = max(abs(lhs), abs(rhs))
            fits = [s for s in (1, -1) if abs(lhs - s * rhs) <= mp.mpf("1e-8") * scale]
            if len(fits) != 1:
                raise AmbiguousSign(f"sign test inconclusive at y = {ystr}")
            votes.append(fits[0])
    if votes[0] != votes[1]:
        raise AmbiguousSign("sign test disagrees between test points")
    E.w_cache = votes[0]
    return votes[0]
