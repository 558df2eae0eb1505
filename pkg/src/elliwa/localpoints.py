"""Norm-coherent local point systems at the logarithm level.

Everything here lives in the semilocal algebra Z[mu_m] tensor Z_p[mu_{p^k}]
mod p^N (CycloRing).  The system of points itself is never materialized:
the formal exponential does not converge on the relevant valuation range,
but every identity we need (trace laws in both tower directions, the
Gauss-sum evaluation law) is stated on logarithms, where it is exact
arithmetic.  All roots of unity are taken from the coherent family
zeta_level, so cross-level identities hold on the nose.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .curve import CurveData, classify, count_points, nonanomalous
from .groupring import UnsupportedCharacter
from .padic import (CycloElem, CycloRing, NonInvertibleOperator, PadicScalar,
                    _phi, solve_phi_linear, solve_phi_quadratic, vp)

RING_SIZE_BOUND = 4096  # max phi(c') * p^k' for a Gauss-law value ring


class AnomalousCurve(ArithmeticError):
    """a_p^{h} = 1 mod p on some Frobenius orbit; the unit-root auxiliary
    solve of the ordinary construction is singular."""


class PrecisionExhausted(ArithmeticError):
    """Accumulated denominators eat more than half the working precision."""


class IdentityFailure(AssertionError):
    """A trace or Gauss law failed at tracked precision: an implementation
    bug, not a math failure."""

    def __init__(self, reports):
        self.reports = reports
        bad = [r for r in reports if not r.ok]
        super().__init__("; ".join(str(r) for r in bad) or "unknown failure")


@dataclass(frozen=True)
class IdentityReport:
    """One verified identity: residual is the p-valuation of the difference
    (tracked precision when the difference vanishes mod p^tracked)."""

    name: str
    residual: int
    tracked: int

    @property
    def ok(self):
        return self.residual >= self.tracked

    def __str__(self):
        tag = "ok" if self.ok else "FAIL"
        return f"{self.name}: residual {self.residual}/{self.tracked} {tag}"

    def to_dict(self):
        return {"name": self.name, "residual": self.residual,
                "tracked": self.tracked, "ok": self.ok}


def _report(name, diff):
    return IdentityReport(name, diff.residual_valuation(),
                          diff.tracked_precision())


def prime_support(m):
    out = []
    d, r = 2, m
    while d * d <= r:
        if r % d == 0:
            out.append(d)
            while r % d == 0:
                r //= d
        d += 1
    if r > 1:
        out.append(r)
    return out


def divisor_set_A(m):
    """Divisors of m with full prime support, ascending; {1} for m = 1."""
    if m < 1:
        raise ValueError("m must be positive")
    supp = set(prime_support(m))
    return [d for d in range(1, m + 1)
            if m % d == 0 and set(prime_support(d)) == supp]


class CSeq:
    """c_{-1} = 0, c_0 = 1, c_j = (a_p c_{j-1} - c_{j-2})/p, kept as exact
    rationals; ord_p(c_j) >= -floor(j/2) (checked)."""

    def __init__(self, p, a_p, J):
        self.p, self.a_p, self.J = p, a_p, J
        vals = [Fraction(0), Fraction(1)]
        for j in range(1, J + 1):
            vals.append((a_p * vals[-1] - vals[-2]) / p)
        self._vals = vals
        for j in range(-1, J + 1):
            if self.valuation(j) < -(j // 2):
                raise ArithmeticError(f"c_{j} breaks the half-denominator bound")

    def c(self, j):
        if not -1 <= j <= self.J:
            raise IndexError("index outside the computed range")
        return self._vals[j + 1]

    def valuation(self, j):
        q = self.c(j)
        if q == 0:
            return 10 ** 9
        return vp(q.numerator, self.p) - vp(q.denominator, self.p)

    def scalar(self, j, N):
        return PadicScalar.from_fraction(self.c(j), self.p, N)


def pi_element(mp_, n, ring):
    """zeta_{m'}^{phi^{-(n+1)}} (zeta_{p^{n+1}}^{sigma_{m'}^{-1}} - 1), the
    level-n uniformizer seed; zero for n <= -1.

    ring must be CycloRing(c = m', k = n+1) for n >= 0.
    """
    if n <= -1:
        return ring.zero()
    if ring.c != mp_ or ring.k != n + 1:
        raise ValueError("ring shape must be (c = m', k = n+1)")
    p = ring.p
    e = pow(p, -(n + 1), mp_) if mp_ > 1 else 0
    u = pow(mp_, -1, p ** (n + 1))
    zc = ring.zeta_level(mp_, e) if mp_ > 1 else ring.one()
    return zc * (ring.zeta_level(p ** (n + 1), u) - ring.one())


@dataclass
class LogPointSystem:
    """Logarithms of the norm coherent point system over Q(mu_{m p^{n+1}}),
    n = -1..n_max, at precision p^N.

    lam_tilde[(m', n)] is log of the building-block point for each divisor
    m' of m (superset of A(m); sub-moduli are needed by the trace checks),
    in CycloRing(c = m', k = n+1).  eta[(m', n)] is the auxiliary solution
    of the Frobenius equation, in CycloRing(c = m', k = 0).  u[m'] solves
    the unit-root equation in the ordinary case (None per entry when the
    anomalous escape hatch was taken).  combined(mu, n) assembles the
    averaged element over A(mu).
    """

    E: CurveData
    p: int
    m: int
    n_max: int
    N: int
    case: str  # supersingular | ordinary
    a_p: int
    eta: dict = field(default_factory=dict)
    lam_tilde: dict = field(default_factory=dict)
    u: dict = field(default_factory=dict)
    cseq: CSeq | None = None
    alpha: PadicScalar | None = None
    beta: PadicScalar | None = None
    anomalous: bool = False
    _combined: dict = field(default_factory=dict)

    def ring(self, mu, n):
        return CycloRing.get(self.p, self.N, mu, n + 1 if n >= 0 else 0)

    def combined(self, mu, n):
        """Sum of (m'/mu) lam_tilde[m', n] over m' in A(mu), in ring(mu, n)."""
        if self.m % mu:
            raise ValueError("mu must divide m")
        key = (mu, n)
        if key not in self._combined:
            tgt = self.ring(mu, n)
            acc = tgt.zero()
            for mp_ in divisor_set_A(mu):
                acc = acc + self.lam_tilde[(mp_, n)].include_into(tgt) \
                    * Fraction(mp_, mu)
            self._combined[key] = acc
        return self._combined[key]

    def lam(self, n):
        return self.combined(self.m, n)


def _divisors(m):
    return [d for d in range(1, m + 1) if m % d == 0]


def build_system(E, p, m, n_max, N, allow_anomalous=False):
    """Solve the eta equations and assemble the logarithm table.

    The ordinary path normally insists on the unit-root solvability
    criterion (a_p^{h_m} != 1 mod p); allow_anomalous keeps going without
    the auxiliary u solve, which only the integrality argument needs, never
    the logarithm identities checked here.
    """
    if m < 1 or m % p == 0:
        raise ValueError("m must be positive and prime to p")
    if n_max < -1:
        raise ValueError("n_max must be at least -1")
    cls = classify(E, p)
    a_p = cls.a_p
    sys_ = LogPointSystem(E=E, p=p, m=m, n_max=n_max, N=N,
                          case="supersingular" if a_p % p == 0 else "ordinary",
                          a_p=a_p)
    if sys_.case == "supersingular":
        if n_max // 2 > N // 2:
            raise PrecisionExhausted("c_j denominators exceed N/2")
        sys_.cseq = CSeq(p, a_p, max(n_max, 0))
    else:
        if n_max > N // 2:
            raise PrecisionExhausted("beta powers exceed N/2")
        from .curve import allowable_roots
        root = allowable_roots(p, a_p, N)
        sys_.alpha = PadicScalar.from_int(root.alpha_unit, p, N)
        sys_.beta = PadicScalar.from_int(a_p, p, N) - sys_.alpha
        if not nonanomalous(E, p, m):
            if not allow_anomalous:
                raise AnomalousCurve(
                    f"a_{p}^h = 1 mod {p} already on Q(mu_{m})")
            sys_.anomalous = True

    for mp_ in _divisors(m):
        flat = CycloRing.get(p, N, mp_, 0)
        zeta = flat.zeta_level(mp_) if mp_ > 1 else flat.one()
        if sys_.case == "supersingular":
            base = solve_phi_quadratic(flat, a_p, zeta * p)
        else:
            base = solve_phi_linear(flat, sys_.beta, zeta * (-sys_.beta))
            if not sys_.anomalous:
                try:
                    sys_.u[mp_] = solve_phi_linear(
                        flat, sys_.alpha.inverse(),
                        zeta * (-sys_.alpha.inverse()))
                except NonInvertibleOperator as exc:
                    raise AnomalousCurve(str(exc)) from exc
            else:
                sys_.u[mp_] = None
        for n in range(-1, n_max + 1):
            eta_n = base.frobenius(-(n + 1))
            sys_.eta[(mp_, n)] = eta_n
            tgt = sys_.ring(mp_, n)
            lam = eta_n.include_into(tgt) if n >= 0 else eta_n
            for j in range(0, n + 1):
                piece = pi_element(mp_, n - j,
                                   sys_.ring(mp_, n - j)).include_into(tgt)
                if sys_.case == "supersingular":
                    cj = sys_.cseq.c(j)
                    if cj:
                        lam = lam + piece * cj
                else:
                    lam = lam + piece * sys_.beta.inverse() ** j
            sys_.lam_tilde[(mp_, n)] = lam
    return sys_


# ---------------------------------------------------------------------------
# trace laws


def _sigma_inverse(elem, l):
    """(-sigma_l^{-1}) elem in elem's ring; l must be a unit there."""
    ring = elem.ring
    M = ring.c * ring.p ** ring.k
    a = pow(l, -1, M) if M > 1 else 0
    return -elem.galois_act(a)


def check_trace_laws(sys_):
    """Verify both tower directions on the combined elements and raise
    IdentityFailure when any residual misses tracked precision."""
    reports = []
    m, p = sys_.m, sys_.p
    for n in range(0, sys_.n_max + 1):
        lhs = sys_.lam(n).trace_y(n)
        if sys_.case == "supersingular":
            if n >= 1:
                rhs = sys_.lam(n - 1) * sys_.a_p \
                    - sys_.lam(n - 2).include_into(sys_.ring(m, n - 1))
            else:
                lam0 = sys_.lam(-1)
                rhs = lam0 * sys_.a_p - lam0.frobenius(1) - lam0.frobenius(-1)
        else:
            if n >= 1:
                rhs = sys_.lam(n - 1) * sys_.alpha
            else:
                lam0 = sys_.lam(-1)
                rhs = lam0 * sys_.alpha - lam0.frobenius(-1)
        reports.append(_report(f"trace-tower[n={n}]", lhs - rhs))
    for l in prime_support(m):
        for n in range(-1, sys_.n_max + 1):
            lhs = sys_.lam(n).trace_x(m // l)
            down = sys_.combined(m // l, n)
            rhs = down if (m // l) % l == 0 else _sigma_inverse(down, l)
            reports.append(_report(f"trace-layer[l={l},n={n}]", lhs - rhs))
    if not all(r.ok for r in reports):
        raise IdentityFailure(reports)
    return reports


# ---------------------------------------------------------------------------
# Gauss-sum evaluation law


def _tame_part(n, p):
    return n // p ** vp(n, p)


def _char_monomial(ring, chi, a):
    """chi(a) as a root-of-unity monomial of ring (zero off the units)."""
    r = chi.value_exponent(a)
    if r is None:
        return ring.zero()
    return ring.zeta_level(r.denominator, r.numerator)


def check_gauss_law(sys_, psi):
    """Compare the character sum of the level-n_psi logarithm against the
    layered Gauss sum, with the Euler factor at unramified psi
    cross-multiplied to keep everything integral."""
    p, m, N = sys_.p, sys_.m, sys_.N
    chi = psi.primitive()
    m_t, n_psi = chi.tame_wild(p)
    if m % m_t or math.gcd(m_t, p) != 1:
        raise UnsupportedCharacter(
            f"conductor {chi.conductor} does not sit in the m = {m} tower")
    if n_psi > sys_.n_max:
        raise UnsupportedCharacter("wild level exceeds the built range")
    t = _tame_part(chi.order, p)
    big_c = m * t // math.gcd(m, t)
    big_k = n_psi + 1 if n_psi >= 0 else 0
    if _phi(big_c) * p ** big_k > RING_SIZE_BOUND:
        raise UnsupportedCharacter("value ring exceeds the size bound")
    big = CycloRing.get(p, N, big_c, big_k)

    mod_small = m * p ** big_k
    psi_full = chi.induce(mod_small) if mod_small > 1 else chi
    lam = sys_.lam(n_psi)
    lhs = big.zero()
    for a in range(1, mod_small + 1):
        if math.gcd(a, mod_small) != 1:
            continue
        val = _char_monomial(big, psi_full, a)
        lhs = lhs + lam.galois_act(a).include_into(big) * val

    # layered Gauss sum over the minimal modulus with the same support as m
    m2 = 1
    for l in prime_support(m):
        m2 *= l ** max(1, vp(m_t, l))
    M2 = m2 * p ** big_k
    psi_up = chi.induce(M2) if M2 > 1 else chi
    tau = big.zero()
    for b in range(1, M2 + 1):
        if math.gcd(b, M2) != 1:
            continue
        tau = tau + _char_monomial(big, psi_up, b) * big.zeta_level(M2, b)

    if n_psi >= 0:
        diff = lhs - tau
    else:
        psi_p = _char_monomial(big, chi, p)
        if sys_.case == "supersingular":
            euler = psi_p * psi_p * p - psi_p * sys_.a_p + big.one()
            diff = euler * lhs - psi_p * psi_p * tau * p
        else:
            euler = psi_p * sys_.beta - big.one()
            diff = euler * lhs - psi_p * tau * sys_.beta
    label = (f"gauss[f={chi.conductor},ord={chi.order}]")
    return _report(label, diff)
