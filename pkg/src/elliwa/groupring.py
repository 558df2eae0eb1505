"""Group rings of (Z/M)^x with the tame/wild splitting at p.

The groups here are G_{m,n} = (Z/(m p^(n+1)))^x with p an odd prime,
p not dividing m, and n >= -1.  For n >= 0 the group splits canonically
as G_{m,0} x <gamma> where gamma is congruent to 1+p at p and to 1 on
the tame part; gamma generates the wild factor of order p^n.  Writing
gamma = 1+T identifies the wild part of the group ring with
Z_p[T]/((1+T)^(p^n) - 1), which is where all the Iwasawa-polynomial
bookkeeping (omega_n, its +/- halves, the cyclotomic factors Phi_j)
lives.

Group-ring coefficients are duck typed: Fraction, PadicScalar,
QuadScalar and CycloElem all work, as do plain ints where they coerce.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd, prod

from .padic import CycloElem, CycloRing, PadicScalar, teichmuller, vp


class BadSubgroup(ValueError):
    """Subgroup specification does not match the ambient group."""


class BadBullet(ValueError):
    """Decomposition flavor invalid for the given prime classification."""


class UnsupportedCharacter(ValueError):
    """Character values do not land in the requested target ring."""


def _crt(r1, m1, r2, m2):
    if m1 == 1:
        return r2 % m2
    if m2 == 1:
        return r1 % m1
    g, inv = gcd(m1, m2), pow(m1, -1, m2)
    assert g == 1
    return (r1 + m1 * ((r2 - r1) * inv % m2)) % (m1 * m2)


def _factor(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# the groups G_{m,n}


class GaloisGroup:
    """(Z/(m p^(n+1)))^x with its distinguished splitting.

    ``decompose(a) = (a0, e)`` writes sigma_a = s(a0) gamma^e with a0 the
    reduction to G_{m,0} and s the Teichmueller section; ``compose``
    inverts this.  Tables are built once per (p, m, n) and shared.
    """

    _CACHE = {}

    def __init__(self, p, m, n):
        if p < 3 or m < 1 or n < -1 or m % p == 0:
            raise ValueError("need p odd prime, m >= 1 prime to p, n >= -1")
        self.p, self.m, self.n = p, m, n
        self.pk = p ** (n + 1)
        self.M = m * self.pk
        self.elements = tuple(a for a in range(1, self.M + 1)
                              if gcd(a, self.M) == 1)
        self.order = len(self.elements)
        if n >= 1:
            self.gamma = _crt(1, m, 1 + p, self.pk)
            # gamma must generate the full wild factor
            if pow(self.gamma, p ** n, self.M) != 1 or \
               pow(self.gamma, p ** (n - 1), self.M) == 1:
                raise ArithmeticError("1+p fails to generate the wild part")
        else:
            self.gamma = 1 % self.M
        self._wild_log = {pow(1 + p, e, self.pk): e
                          for e in range(p ** max(n, 0))}
        self._decomp = {}
        for a in self.elements:
            if n < 0:
                self._decomp[a] = (a, 0)
                continue
            ap = a % self.pk
            tame = pow(ap, p ** n, self.pk)
            e = self._wild_log[ap * pow(tame, -1, self.pk) % self.pk]
            self._decomp[a] = (a % (m * p), e)

    @classmethod
    def get(cls, p, m, n):
        key = (p, m, n)
        if key not in cls._CACHE:
            cls._CACHE[key] = cls(p, m, n)
        return cls._CACHE[key]

    def decompose(self, a):
        return self._decomp[a % self.M]

    def compose(self, a0, e):
        s = self._tame_lift(a0)
        return s * pow(self.gamma, e % self.p ** max(self.n, 0), self.M) % self.M

    def _tame_lift(self, a0):
        # Teichmueller section G_{m,0} -> G_{m,n}; x^(p^n) mod p^(n+1)
        # depends only on x mod p, so any integer lift of a0 works.
        if self.n <= 0:
            return a0 % self.M
        return _crt(a0 % self.m, self.m,
                    pow(a0, self.p ** self.n, self.pk), self.pk)

    def delta_elements(self):
        """Teichmueller lifts of (Z/p)^x, the copy of Delta in G_{m,n}."""
        if self.n < 0:
            raise BadSubgroup("Delta does not sit inside G_{m,-1}")
        return tuple(_crt(1, self.m, pow(c, self.p ** self.n, self.pk), self.pk)
                     for c in range(1, self.p))

    def level_kernel(self, m2, n2):
        """Elements of the kernel of G_{m,n} -> G_{m2,n2}."""
        if self.m % m2 or n2 > self.n or n2 < -1 or m2 % self.p == 0:
            raise BadSubgroup("not a quotient level")
        M2 = m2 * self.p ** (n2 + 1)
        return tuple(a for a in self.elements if a % M2 == 1)

    def inertia_kernel(self, l):
        """Kernel of G_{m,n} -> G_{m/l^e,n}, e the full power of l in m."""
        if self.m % l:
            raise BadSubgroup("l does not divide m")
        e = vp(self.m, l)
        return self.level_kernel(self.m // l ** e, self.n)

    def __repr__(self):
        return f"G({self.m},{self.n};p={self.p})"


# ---------------------------------------------------------------------------
# group-ring elements with duck-typed coefficients


def _is_exact_zero(s):
    if isinstance(s, PadicScalar):
        return s.is_zero
    if isinstance(s, CycloElem):
        return not s.reduced().terms
    if isinstance(s, (int, Fraction)):
        return s == 0
    if s.__class__.__name__ == "QuadScalar":
        return s.u0 == 0 and s.u1 == 0
    return False


def _mul_any(a, b):
    try:
        return a * b
    except TypeError:
        return b * a


class GroupRingElem:
    __slots__ = ("group", "coeffs")

    def __init__(self, group, coeffs):
        self.group = group
        self.coeffs = {}
        for a, c in coeffs.items():
            a %= group.M
            if gcd(a, group.M) != 1:
                raise ValueError(f"{a} is not a unit mod {group.M}")
            if a in self.coeffs:
                self.coeffs[a] = self.coeffs[a] + c
            else:
                self.coeffs[a] = c

    @classmethod
    def sigma(cls, group, a, coeff=Fraction(1)):
        return cls(group, {a: coeff})

    @classmethod
    def zero(cls, group):
        return cls(group, {})

    def coeff(self, a, default=Fraction(0)):
        return self.coeffs.get(a % self.group.M, default)

    def support(self):
        return sorted(a for a, c in self.coeffs.items()
                      if not _is_exact_zero(c))

    def _check(self, other):
        if self.group is not other.group and \
           (self.group.p, self.group.m, self.group.n) != \
           (other.group.p, other.group.m, other.group.n):
            raise ValueError("group mismatch")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out[a] + c if a in out else c
        return GroupRingElem(self.group, out)

    def __neg__(self):
        return GroupRingElem(self.group, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, GroupRingElem):
            return self.scale(other)
        self._check(other)
        M = self.group.M
        out = {}
        for a, c in self.coeffs.items():
            if _is_exact_zero(c):
                continue
            for b, d in other.coeffs.items():
                k = a * b % M
                cd = _mul_any(c, d)
                out[k] = out[k] + cd if k in out else cd
        return GroupRingElem(self.group, out)

    __rmul__ = __mul__

    def scale(self, s):
        return GroupRingElem(self.group,
                             {a: _mul_any(c, s) for a, c in self.coeffs.items()})

    def act(self, a):
        """Multiply by sigma_a."""
        M = self.group.M
        return GroupRingElem(self.group,
                             {b * a % M: c for b, c in self.coeffs.items()})

    def involution(self):
        M = self.group.M
        return GroupRingElem(self.group,
                             {pow(a, -1, M): c for a, c in self.coeffs.items()})

    def augmentation(self):
        tot = None
        for c in self.coeffs.values():
            tot = c if tot is None else tot + c
        return Fraction(0) if tot is None else tot

    def map_coeffs(self, f):
        return GroupRingElem(self.group,
                             {a: f(c) for a, c in self.coeffs.items()})

    def to_json_dict(self):
        def enc(c):
            if isinstance(c, Fraction):
                return f"{c.numerator}/{c.denominator}"
            if isinstance(c, int):
                return f"{c}/1"
            if isinstance(c, PadicScalar):
                return {"valuation": None if c.is_zero else c.v,
                        "unit": 0 if c.is_zero else c.u,
                        "precision": c.N}
            if c.__class__.__name__ == "QuadScalar":
                return {"u0": c.u0, "u1": c.u1, "denom_exp": c.e,
                        "precision": c.M}
            raise TypeError(f"no JSON form for {type(c).__name__} coefficients")
        return {"modulus": self.group.M,
                "coeffs": {str(a): enc(c) for a, c in sorted(self.coeffs.items())
                           if not _is_exact_zero(c)}}

    def __repr__(self):
        parts = [f"({self.coeffs[a]})s{a}" for a in self.support()[:6]]
        more = "" if len(self.support()) <= 6 else " + ..."
        return " + ".join(parts) + more if parts else "0"


# ---------------------------------------------------------------------------
# norm elements, projections, lifts


def project_z(xi, small):
    """Push along (Z/M)^x -> (Z/M')^x, summing fibers."""
    G = xi.group
    if small.p != G.p or G.m % small.m or small.n > G.n:
        raise BadSubgroup("target is not a quotient level")
    out = {}
    for a, c in xi.coeffs.items():
        k = a % small.M
        out[k] = out[k] + c if k in out else c
    return GroupRingElem(small, out)


def norm_lift(xi, big):
    """The map nu: A[G'] -> A[G] copying coefficients to full fibers."""
    G = xi.group
    if big.p != G.p or big.m % G.m or G.n > big.n:
        raise BadSubgroup("source is not a quotient level")
    out = {}
    for b in big.elements:
        c = xi.coeffs.get(b % G.M)
        if c is not None:
            out[b] = c
    return GroupRingElem(big, out)


def norm_element(group, kind, data=None):
    """Sum of a designated subgroup: Delta, an inertia group, or a
    level kernel.  Coefficients are Fraction(1)."""
    if kind == "delta":
        elems = group.delta_elements()
    elif kind == "inertia":
        elems = group.inertia_kernel(data)
    elif kind == "inertia_set":
        m2 = group.m
        for l in data:
            if m2 % l:
                raise BadSubgroup("l does not divide m")
            m2 //= l ** vp(m2, l)
        elems = group.level_kernel(m2, group.n)
    elif kind == "level":
        elems = group.level_kernel(*data)
    else:
        raise BadSubgroup(f"unknown subgroup kind {kind!r}")
    return GroupRingElem(group, {a: Fraction(1) for a in elems})


# ---------------------------------------------------------------------------
# Iwasawa polynomials


def _binom_row(e):
    row = [1]
    for i in range(e):
        row.append(row[-1] * (e - i) // (i + 1))
    return row


class IwasawaPoly:
    """Polynomial in T over Z/p^N, optionally reduced mod omega_n.

    With a level n attached the representative has degree < p^n and
    multiplication reduces mod (1+T)^(p^n) - 1.
    """

    __slots__ = ("p", "N", "coeffs", "level")

    def __init__(self, p, N, coeffs, level=None):
        self.p, self.N, self.level = p, N, level
        mod = p ** N
        cs = [c % mod for c in coeffs]
        if level is not None:
            cs = _reduce_mod_omega(cs, p, level, mod)
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def constant(cls, p, N, c, level=None):
        return cls(p, N, [c], level)

    def degree(self):
        return len(self.coeffs) - 1

    def _check(self, other):
        if (self.p, self.N, self.level) != (other.p, other.N, other.level):
            raise ValueError("incompatible Iwasawa polynomials")

    def __add__(self, other):
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return IwasawaPoly(self.p, self.N, [x + y for x, y in zip(a, b)],
                           self.level)

    def __neg__(self):
        return IwasawaPoly(self.p, self.N, [-c for c in self.coeffs], self.level)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IwasawaPoly(self.p, self.N,
                               [c * other for c in self.coeffs], self.level)
        self._check(other)
        out = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IwasawaPoly(self.p, self.N, out, self.level)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, IwasawaPoly) and \
            (self.p, self.N, self.level, self.coeffs) == \
            (other.p, other.N, other.level, other.coeffs)

    def __hash__(self):
        return hash((self.p, self.N, self.level, self.coeffs))

    def at_level(self, n):
        return IwasawaPoly(self.p, self.N, self.coeffs, n)

    def substitute(self, x, one):
        """Evaluate at T = x by Horner; ``one`` is the target's unit."""
        acc = _mul_any(one, 0)
        for c in reversed(self.coeffs):
            acc = _mul_any(acc, x) + _mul_any(one, c)
        return acc

    def to_group_ring(self, group):
        """Image under T -> sigma_gamma - 1, as integer coefficients."""
        if group.p != self.p or group.n < 0:
            raise ValueError("need a level >= 0 group over the same p")
        mod = self.p ** self.N
        out = {}
        # expand T^i = (gamma - 1)^i by binomials
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            row = _binom_row(i)
            for j, b in enumerate(row):
                g = pow(group.gamma, j, group.M)
                sgn = -1 if (i - j) % 2 else 1
                out[g] = (out.get(g, 0) + sgn * c * b) % mod
        return GroupRingElem(group, out)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*T^{i}" for i, c in enumerate(self.coeffs) if c)


def _reduce_mod_omega(cs, p, n, mod):
    # omega_n = (1+T)^(p^n) - 1, monic of degree p^n
    d = p ** n
    omega = _binom_row(d)
    omega[0] -= 1
    cs = [c % mod for c in cs]
    for i in range(len(cs) - 1, d - 1, -1):
        top = cs[i]
        if top:
            for j, w in enumerate(omega):
                cs[i - d + j] = (cs[i - d + j] - top * w) % mod
        assert cs[i] == 0
    return cs[:d]


def one_plus_T_pow(p, N, e, level=None):
    """(1+T)^e as an IwasawaPoly."""
    return IwasawaPoly(p, N, _binom_row(e), level)


def phi_poly(p, N, j, level=None):
    """Phi_j(1+T) = ((1+T)^(p^j) - 1)/((1+T)^(p^(j-1)) - 1), j >= 1."""
    if j < 1:
        raise ValueError("j >= 1")
    out = [0] * (p ** j - p ** (j - 1) + 1)
    for s in range(p):
        for i, b in enumerate(_binom_row(s * p ** (j - 1))):
            out[i] += b
    return IwasawaPoly(p, N, out, level)


def omega_family(p, N, n):
    """omega_n and its plus/minus factorization, plus the Phi_j = N_j.

    Returns unreduced polynomials; the identity
    omega~_n^{+-} * omega_n^{-+} = omega_n holds exactly.
    """
    if n < 0:
        raise ValueError("n >= 0")
    phis = {j: phi_poly(p, N, j) for j in range(1, n + 1)}
    one = IwasawaPoly.constant(p, N, 1)
    T = IwasawaPoly(p, N, [0, 1])
    tilde_plus, tilde_minus = one, one
    for j in range(1, n + 1):
        if j % 2 == 0:
            tilde_plus = tilde_plus * phis[j]
        else:
            tilde_minus = tilde_minus * phis[j]
    omega = one_plus_T_pow(p, N, p ** n) - one
    return {
        "omega": omega,
        "phi": phis,
        "N": phis,
        "omega_tilde_plus": tilde_plus,
        "omega_tilde_minus": tilde_minus,
        "omega_plus": T * tilde_plus,
        "omega_minus": T * tilde_minus,
    }


# conversions between the sigma_a basis and the (a0, T-power) presentation


def to_tame_polys(xi, N):
    """Decompose xi over G_{m,n} as {a0: IwasawaPoly}, gamma = 1+T.

    Coefficients must be plain ints (reduce first); level n is attached
    and the polynomials live over Z/p^N.
    """
    G = xi.group
    if G.n < 0:
        raise ValueError("need n >= 0")
    d = G.p ** G.n
    buckets = {}
    for a, c in xi.coeffs.items():
        a0, e = G.decompose(a)
        buckets.setdefault(a0, [0] * d)[e] += c
    out = {}
    for a0, wild in buckets.items():
        # wild is in the (1+T)^e basis; expand to T powers
        cs = [0] * d
        for e, u in enumerate(wild):
            if u:
                for j, b in enumerate(_binom_row(e)):
                    cs[j] += u * b
        out[a0] = IwasawaPoly(G.p, N, cs, G.n)
    return out


def tame_polys_to_elem(group, polys, N=None):
    """Inverse of to_tame_polys: {a0: IwasawaPoly} -> GroupRingElem."""
    out = {}
    mod = None if N is None else group.p ** N
    for a0, poly in polys.items():
        # T^j -> (gamma - 1)^j
        for j, c in enumerate(poly.coeffs):
            if not c:
                continue
            for e, b in enumerate(_binom_row(j)):
                a = group.compose(a0, e)
                sgn = -1 if (j - e) % 2 else 1
                v = out.get(a, 0) + sgn * c * b
                out[a] = v % mod if mod else v
    return GroupRingElem(group, out)


# ---------------------------------------------------------------------------
# Dirichlet characters


class _CyclicFactor:
    __slots__ = ("q", "e", "gen", "order", "dlog")

    def __init__(self, q, e, gen, order, dlog):
        self.q, self.e, self.gen, self.order, self.dlog = q, e, gen, order, dlog


class CharGroup:
    """Character group of (Z/M)^x via an explicit cyclic decomposition.

    Odd prime powers contribute one cyclic factor with the smallest
    primitive root as generator; 2^e contributes <-1> x <5> (e >= 3),
    <-1> (e = 2), or nothing (e <= 1).  Generator choices are
    deterministic so reports can cite them.
    """

    _CACHE = {}

    def __init__(self, M):
        self.M = M
        self.factors = []
        for q, e in sorted(_factor(M).items()):
            qe = q ** e
            if q == 2:
                if e == 1:
                    continue
                if e == 2:
                    self.factors.append(
                        _CyclicFactor(2, e, 3, 2, {1: 0, 3: 1}))
                    continue
                # (Z/2^e)^x = <-1> x <5>; index every odd residue in both
                sign_log, five_log = {}, {}
                for s in range(2):
                    for t in range(2 ** (e - 2)):
                        a = (-1) ** s * pow(5, t, qe) % qe
                        sign_log[a], five_log[a] = s, t
                self.factors.append(
                    _CyclicFactor(2, e, qe - 1, 2, sign_log))
                self.factors.append(
                    _CyclicFactor(2, e, 5, 2 ** (e - 2), five_log))
                continue
            phi_qe = qe - qe // q
            for g in range(2, qe):
                if g % q and self._order(g, qe, phi_qe) == phi_qe:
                    self.factors.append(self._cyclic(qe, g, phi_qe))
                    break

    @staticmethod
    def _order(g, qe, bound):
        o, x = 1, g % qe
        while x != 1:
            x = x * g % qe
            o += 1
            if o > bound:
                raise ArithmeticError("order overflow")
        return o

    @staticmethod
    def _cyclic(qe, g, order):
        dlog, x = {}, 1
        for k in range(order):
            dlog[x] = k
            x = x * g % qe
        q = next(iter(_factor(qe)))
        return _CyclicFactor(q, vp(qe, q), g, order, dlog)

    @classmethod
    def get(cls, M):
        if M not in cls._CACHE:
            cls._CACHE[M] = cls(M)
        return cls._CACHE[M]

    def chars(self):
        ranges = [range(f.order) for f in self.factors]
        for exps in itertools.product(*ranges):
            yield DirichletChar(self.M, exps)


class DirichletChar:
    """Character of (Z/M)^x given by exponents on the cyclic factors.

    ``value_exponent(a)`` returns r in Q with value exp(2 pi i r), or
    None off the units.  p-adic evaluations land in Z_p when the order
    divides p-1 and in a cyclotomic ring with a big enough wild leg
    otherwise.
    """

    def __init__(self, M, exps):
        self.M = M
        self.group = CharGroup.get(M)
        if len(exps) != len(self.group.factors):
            raise ValueError("exponent tuple has wrong length")
        self.exps = tuple(k % f.order
                          for k, f in zip(exps, self.group.factors))

    def value_exponent(self, a):
        if gcd(a, self.M) != 1:
            return None
        r = Fraction(0)
        for k, f in zip(self.exps, self.group.factors):
            qe = f.q ** f.e
            r += Fraction(k * f.dlog[a % qe], f.order)
        return r % 1

    @property
    def order(self):
        o = 1
        for k, f in zip(self.exps, self.group.factors):
            d = f.order // gcd(f.order, k)
            o = o * d // gcd(o, d)
        return o

    @property
    def conductor(self):
        cond = 1
        two_part = 1
        for k, f in zip(self.exps, self.group.factors):
            d = f.order // gcd(f.order, k)
            if d == 1:
                continue
            if f.q == 2:
                # <-1> alone forces 4; a nontrivial <5>-part of order d
                # forces 2^(v2(d)+2)
                lvl = 4 if f.gen == f.q ** f.e - 1 else 2 ** (vp(d, 2) + 2)
                two_part = max(two_part, lvl)
            else:
                cond *= f.q ** (vp(d, f.q) + 1)
        return cond * two_part

    def is_even(self):
        r = self.value_exponent(self.M - 1) if self.M > 1 else Fraction(0)
        return r == 0

    @property
    def sign(self):
        return "+" if self.is_even() else "-"

    def inverse(self):
        return DirichletChar(self.M, tuple(-k for k in self.exps))

    def __mul__(self, other):
        if self.M != other.M:
            raise ValueError("modulus mismatch")
        return DirichletChar(self.M, tuple(a + b for a, b in
                                           zip(self.exps, other.exps)))

    def __eq__(self, other):
        return isinstance(other, DirichletChar) and \
            (self.M, self.exps) == (other.M, other.exps)

    def __hash__(self):
        return hash((self.M, self.exps))

    def primitive(self):
        """The character mod its conductor inducing this one."""
        f = self.conductor
        for chi in CharGroup.get(f).chars():
            if all(chi.value_exponent(a) == self.value_exponent(a)
                   for a in range(1, self.M + 1)
                   if gcd(a, self.M) == 1 and gcd(a, f) == 1):
                return chi
        raise ArithmeticError("primitive character not found")

    def induce(self, M2):
        """The character mod M2 with the same primitive part.

        Exponents are read off on each cyclic generator of (Z/M2)^x; the
        generator embeds as a unit congruent to 1 away from its own prime
        power, so its order in the big group matches the factor order and
        the exponent is integral.
        """
        chi = self if self.conductor == self.M else self.primitive()
        if M2 % chi.M:
            raise ValueError("conductor does not divide the target modulus")
        exps = []
        for f in CharGroup.get(M2).factors:
            qe = f.q ** f.e
            rest = M2 // qe
            g = _crt(f.gen % qe, qe, 1 % rest, rest) if rest > 1 else f.gen % qe
            r = chi.value_exponent(g % chi.M) if chi.M > 1 else Fraction(0)
            k = r * f.order
            if k.denominator != 1:
                raise ArithmeticError("induced exponent not integral")
            exps.append(int(k))
        return DirichletChar(M2, tuple(exps))

    def tame_wild(self, p):
        """Split the conductor as m * p^(n+1) and return (m, n), n >= -1."""
        f = self.conductor
        k = vp(f, p)
        return f // p ** k, k - 1

    def eval_complex(self, a, ctx):
        r = self.value_exponent(a)
        if r is None:
            return ctx.mpc(0)
        return ctx.expjpi(2 * ctx.mpf(r.numerator) / r.denominator)

    def eval_padic(self, a, p, N):
        """Value as a PadicScalar; needs order | p-1."""
        r = self.value_exponent(a)
        if r is None:
            return PadicScalar.zero(p, N)
        d = r.denominator
        if (p - 1) % d:
            raise UnsupportedCharacter(
                f"order-{self.order} values do not lie in Z_{p}")
        root = _tame_root(p, N)
        val = pow(root, (p - 1) // d * r.numerator, p ** N)
        return PadicScalar.from_int(val, p, N)

    def eval_cyclo(self, a, ring):
        """Value as a CycloElem of ``ring``; wild part uses the y-leg."""
        r = self.value_exponent(a)
        if r is None:
            return ring.zero()
        d = r.denominator
        kk = vp(d, ring.p)
        dt = d // ring.p ** kk
        if (ring.p - 1) % dt:
            raise UnsupportedCharacter("tame order does not divide p-1")
        if kk > ring.k:
            raise UnsupportedCharacter("wild order exceeds the ring level")
        # split zeta_d^j = zeta_dt^(j/p^kk) * zeta_(p^kk)^(j/dt)
        j = r.numerator
        out = ring.one()
        if dt > 1:
            jt = j * pow(ring.p ** kk, -1, dt) % dt
            root = _tame_root(ring.p, ring.N)
            out = out * pow(root, (ring.p - 1) // dt * jt, ring.p ** ring.N)
        if kk > 0:
            jw = j * pow(dt, -1, ring.p ** kk) % ring.p ** kk
            out = out * ring.zeta_pk(jw * ring.p ** (ring.k - kk))
        return out


def _tame_root(p, N):
    for g in range(2, p):
        o, x = 1, g
        while x != 1:
            x = x * g % p
            o += 1
        if o == p - 1:
            return teichmuller(g, p, N)
    raise ArithmeticError("no primitive root")


def char_eval(xi, psi, target):
    """Sum of coeff(a) psi(a) over the support, in the chosen target.

    ``target`` is "complex" (via mpmath at its current precision), a
    tuple ("padic", p, N), or a CycloRing.
    """
    G = xi.group
    if G.M % psi.M:
        raise UnsupportedCharacter("character modulus does not divide M")
    if target == "complex":
        import mpmath
        tot = mpmath.mpc(0)
        for a, c in xi.coeffs.items():
            v = psi.eval_complex(a, mpmath.mp)
            if isinstance(c, Fraction):
                c = mpmath.mpf(c.numerator) / c.denominator
            tot += v * c
        return tot
    if isinstance(target, tuple) and target[0] == "padic":
        _, p, N = target
        tot = PadicScalar.zero(p, N)
        for a, c in xi.coeffs.items():
            if isinstance(c, (int, Fraction)):
                c = PadicScalar.from_fraction(Fraction(c), p, N)
            tot = tot + psi.eval_padic(a, p, N) * c
        return tot
    if isinstance(target, CycloRing):
        tot = target.zero()
        for a, c in xi.coeffs.items():
            v = psi.eval_cyclo(a, target)
            tot = tot + _mul_any(v, c)
        return tot
    raise ValueError(f"unknown target {target!r}")


# ---------------------------------------------------------------------------
# auxiliary ideals W


def W_ideal(group, bullet, prime_class):
    """Generators of W^bullet in the level-n group ring.

    (1) for {plain, plus, flat} and for sharp when p | a_p != 0;
    (N_Delta, gamma - 1) for {minus, sharp} when a_p = 0.
    """
    if bullet not in prime_class.bullets:
        raise BadBullet(f"{bullet!r} unavailable for kind {prime_class.kind}")
    one = [GroupRingElem.sigma(group, 1)]
    if bullet in ("plain", "plus", "flat"):
        return one
    if bullet == "sharp" and prime_class.a_p != 0:
        return one
    if bullet in ("minus", "sharp") and prime_class.a_p == 0:
        ndelta = norm_element(group, "delta")
        gm1 = GroupRingElem(group, {group.gamma: Fraction(1),
                                    1: Fraction(-1)})
        return [ndelta, gm1]
    raise BadBullet(f"no W ideal for {bullet!r} with a_p = {prime_class.a_p}")
