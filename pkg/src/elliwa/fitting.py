"""Fitting ideals of finitely presented modules over (Z/p^N)[G].

Everything here reduces to linear algebra over Z/p^N through the group
ring's regular representation: an element of R = (Z/p^N)[G] becomes the
|G| x |G| integer matrix of multiplication on the sigma_a basis, a
relation matrix over R becomes a block matrix over Z/p^N, and ideal or
module questions become row-span questions.  The workhorse is the
Howell normal form, the canonical echelon form over Z/p^N: it makes
span membership decidable by greedy reduction and hands out an exact
certificate for every positive answer.

Conventions.  Modules are cokernels of RIGHT multiplication by the
presentation matrix, rows being relations; x in R^r maps to x*A in R^g.
Fractional ideals carry a single denominator element d and stand for
(1/d)(g_1, ..., g_k); membership of xi means solvability of
xi * d = sum c_i g_i, so no actual division ever happens and zero
divisors in the coefficient ring stay harmless.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .curve import BoundExceeded, CurveData, count_points
from .groupring import GaloisGroup, GroupRingElem, norm_element
from .padic import IntegralityFailure, vp


class MembershipFailure(ArithmeticError):
    """Ideal membership fails at the working precision.

    Carries the residual valuation (digits of the obstruction) so the
    caller can distinguish a near miss from a flat failure.
    """

    def __init__(self, msg, residual_valuation=None):
        super().__init__(msg)
        self.residual_valuation = residual_valuation


class NotExact(ArithmeticError):
    """A claimed resolution fails its exactness checks at precision."""


class ZeroDivisorDet(ArithmeticError):
    """A determinant that must be invertible-at-precision is not."""


class MatrixRequired(ValueError):
    """Mod-p data cannot settle the local ideal; pass a Frobenius matrix."""


# ---------------------------------------------------------------------------
# Howell normal form over Z/p^N


class Howell:
    """Echelon data: ``rows[i]`` has pivot p^{ks[i]} at column ``cols[i]``;
    ``certs[i]`` expresses the row over the input rows; ``kernel`` rows
    are input combinations with zero image (present when tracked)."""

    __slots__ = ("p", "N", "ncols", "rows", "cols", "ks", "certs", "kernel")

    def __init__(self, p, N, ncols, rows, cols, ks, certs, kernel):
        self.p, self.N, self.ncols = p, N, ncols
        self.rows, self.cols, self.ks = rows, cols, ks
        self.certs, self.kernel = certs, kernel

    def span_log_size(self):
        """log_p of the number of vectors in the row span."""
        return sum(self.N - k for k in self.ks)


def howell_form(mat, ncols, p, N, track=False):
    """Canonical row form of ``mat`` over Z/p^N.

    Pivots are chosen with minimal valuation per column, scaled to a
    power of p, and every other row is cleared (fully below, mod the
    pivot power above).  A p^{N-k} multiple of each imperfect pivot row
    re-enters the pool so the form captures the whole span.
    """
    mod = p ** N
    nin = len(mat)
    pool = []
    for i, r in enumerate(mat):
        if len(r) != ncols:
            raise ValueError("ragged matrix")
        vec = [x % mod for x in r]
        t = None
        if track:
            t = [0] * nin
            t[i] = 1
        pool.append((vec, t))
    done = []
    for col in range(ncols):
        best, best_k = None, N
        for idx, (vec, _) in enumerate(pool):
            e = vec[col]
            if e == 0:
                continue
            k = vp(e, p)
            if k < best_k:
                best, best_k = idx, k
        if best is None:
            continue
        vec, t = pool.pop(best)
        k = best_k
        pk = p ** k
        u = pow(vec[col] // pk, -1, mod)
        vec = [x * u % mod for x in vec]
        if track:
            t = [x * u % mod for x in t]
        for j, (w, s) in enumerate(pool):
            e = w[col]
            if e:
                q = e // pk  # exact: the pivot had minimal valuation
                w = [(a - q * b) % mod for a, b in zip(w, vec)]
                if track:
                    s = [(a - q * b) % mod for a, b in zip(s, t)]
                pool[j] = (w, s)
        for j, (w, s, c0, k0) in enumerate(done):
            q = w[col] // pk
            if q:
                w = [(a - q * b) % mod for a, b in zip(w, vec)]
                if track:
                    s = [(a - q * b) % mod for a, b in zip(s, t)]
                done[j] = (w, s, c0, k0)
        done.append((vec, t, col, k))
        if k:
            scale = p ** (N - k)
            extra = [x * scale % mod for x in vec]
            et = [x * scale % mod for x in t] if track else None
            pool.append((extra, et))
    kernel = []
    if track:
        kernel = [t for vec, t in pool if any(t) and not any(vec)]
    rows = [w for w, _, _, _ in done]
    certs = [s for _, s, _, _ in done] if track else None
    cols = [c for _, _, c, _ in done]
    ks = [k for _, _, _, k in done]
    return Howell(p, N, ncols, rows, cols, ks, certs, kernel)


def reduce_vector(hw, vec):
    """Greedy reduction of ``vec`` against the form.

    Returns (residual, combo): ``combo[i]`` multiplies echelon row i and
    vec = sum combo[i] rows[i] + residual.  Membership in the span is
    residual == 0; the Howell property makes the greedy pass complete.
    """
    mod = hw.p ** hw.N
    v = [x % mod for x in vec]
    combo = [0] * len(hw.rows)
    for i, (row, col, k) in enumerate(zip(hw.rows, hw.cols, hw.ks)):
        e = v[col]
        if e == 0:
            continue
        if vp(e, hw.p) < k:
            continue  # leading obstruction; will show in the residual
        q = e // hw.p ** k
        combo[i] = q % mod
        v = [(a - q * b) % mod for a, b in zip(v, row)]
    return v, combo


def solve_in_span(hw, vec):
    """Certificate over the INPUT rows for vec, or None.

    Needs a tracked form.  Returns (cert, residual_valuation); the
    certificate is exact (residual zero) when it is not None.
    """
    residual, combo = reduce_vector(hw, vec)
    mod = hw.p ** hw.N
    rv = min((vp(x, hw.p) for x in residual if x), default=hw.N)
    if any(residual):
        return None, rv
    if hw.certs is None:
        return [], rv
    nin = len(hw.certs[0]) if hw.certs else 0
    cert = [0] * nin
    for q, t in zip(combo, hw.certs):
        if q:
            for j, x in enumerate(t):
                cert[j] = (cert[j] + q * x) % mod
    return cert, hw.N


# ---------------------------------------------------------------------------
# flattening R = (Z/p^N)[G] to Z/p^N


class RingCtx:
    """Basis bookkeeping for one (group, precision) pair."""

    _CACHE = {}

    def __init__(self, group, N):
        self.group, self.N = group, N
        self.p = group.p
        self.mod = group.p ** N
        self.basis = group.elements
        self.index = {a: i for i, a in enumerate(self.basis)}
        self.size = len(self.basis)

    @classmethod
    def get(cls, group, N):
        key = (group.p, group.m, group.n, N)
        if key not in cls._CACHE:
            cls._CACHE[key] = cls(GaloisGroup.get(group.p, group.m, group.n), N)
        return cls._CACHE[key]

    def coerce(self, c):
        """Coefficient to an integer mod p^N; p in a denominator is an
        error here, scale the element first."""
        if isinstance(c, int):
            return c % self.mod
        c = Fraction(c)
        if c.denominator % self.p == 0:
            raise IntegralityFailure(
                f"coefficient {c} has a p-denominator; scale it away first")
        return c.numerator * pow(c.denominator, -1, self.mod) % self.mod

    def vector(self, xi):
        v = [0] * self.size
        for a, c in xi.coeffs.items():
            v[self.index[a % self.group.M]] = \
                (v[self.index[a % self.group.M]] + self.coerce(c)) % self.mod
        return v

    def element(self, vec):
        return GroupRingElem(self.group,
                             {a: x % self.mod for a, x in zip(self.basis, vec)
                              if x % self.mod})

    def reg_rows(self, xi):
        """Rows of multiplication by xi: row b holds sigma_b * xi."""
        base = self.vector(xi)
        M = self.group.M
        out = []
        for b in self.basis:
            row = [0] * self.size
            for a, c in zip(self.basis, base):
                if c:
                    row[self.index[a * b % M]] = c
            out.append(row)
        return out

    def one(self):
        return GroupRingElem.sigma(self.group, 1, 1)

    def scalar(self, c):
        return GroupRingElem.sigma(self.group, 1, self.coerce(c))


def flatten_rows(ctx, rows):
    """R-matrix (list of rows of elements) to a Z/p^N block matrix."""
    out = []
    for row in rows:
        regs = [ctx.reg_rows(x) for x in row]
        for b in range(ctx.size):
            flat = []
            for reg in regs:
                flat.extend(reg[b])
            out.append(flat)
    return out


def flatten_element_row(ctx, row):
    v = []
    for x in row:
        v.extend(ctx.vector(x))
    return v


def unflatten_row(ctx, vec, width):
    return tuple(ctx.element(vec[j * ctx.size:(j + 1) * ctx.size])
                 for j in range(width))


def nzd_defect(ctx, d):
    """Largest pivot valuation of multiplication by d.

    Zero means d is a unit; k means the kernel of multiplication by d
    consists of p^{N-k}-torsion artifacts only (k digits of loss when
    cancelling d).  N means d kills a full basis direction.
    """
    hw = howell_form(ctx.reg_rows(d), ctx.size, ctx.p, ctx.N)
    if len(hw.rows) < ctx.size:
        return ctx.N
    return max(hw.ks, default=0)


# ---------------------------------------------------------------------------
# fractional ideals with a single denominator


@dataclass
class MembershipResult:
    ok: bool
    residual_valuation: int
    certificate: tuple | None
    lhs: GroupRingElem | None = None
    rhs_gens: tuple = ()
    _modulus: int = 0

    def verify(self):
        """Recompute the certified identity exactly in R; vacuous (True)
        for a negative answer, which needs no witness."""
        if not self.ok:
            return True
        if self.certificate is None or self.lhs is None:
            return False
        acc = None
        for c, g in zip(self.certificate, self.rhs_gens):
            term = c * g
            acc = term if acc is None else acc + term
        diff = self.lhs - acc if acc is not None else self.lhs
        return _is_zero_mod(diff, self._modulus)


def _is_zero_mod(xi, mod):
    return all((int(c) % mod) == 0 for c in xi.coeffs.values())


class FracIdeal:
    """(1/denom) * (gens) inside (Z/p^N)[G].

    ``gens`` have integer coefficients; ``denom`` defaults to 1.  The
    Howell form of the generator span is cached per scaling element.
    """

    def __init__(self, ctx, gens, denom=None):
        self.ctx = ctx
        self.gens = tuple(self._intify(g) for g in gens)
        self.denom = self._intify(denom) if denom is not None else ctx.one()
        self._span = {}

    def _intify(self, g):
        if isinstance(g, (int, Fraction)):
            return self.ctx.scalar(g)
        return self.ctx.element(self.ctx.vector(g))

    @classmethod
    def unit(cls, ctx):
        return cls(ctx, [ctx.one()])

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, [])

    @classmethod
    def principal(cls, ctx, g, denom=None):
        return cls(ctx, [g], denom)

    def _span_for(self, scale):
        key = tuple(sorted(scale.coeffs.items())) if scale is not None else None
        if key not in self._span:
            rows = []
            for g in self.gens:
                gg = g if scale is None else g * scale
                rows.extend(self.ctx.reg_rows(gg))
            self._span[key] = howell_form(rows, self.ctx.size,
                                          self.ctx.p, self.ctx.N, track=True)
        return self._span[key]

    def membership(self, xi, xi_denom=None):
        """Does xi/xi_denom lie in the ideal?

        Certifies xi * denom = sum c_i (g_i * xi_denom) exactly; a
        failed test is a valid answer and carries the residual
        valuation of the obstruction.
        """
        ctx = self.ctx
        xi = self._intify(xi)
        scale = None if xi_denom is None else self._intify(xi_denom)
        if not self.gens:
            lhs = xi * self.denom
            zero = _is_zero_mod(lhs, ctx.mod)
            rv = ctx.N if zero else min(vp(int(c) % ctx.mod, ctx.p)
                                        for c in lhs.coeffs.values()
                                        if int(c) % ctx.mod)
            res = MembershipResult(zero, rv, () if zero else None, lhs, ())
            res._modulus = ctx.mod
            return res
        hw = self._span_for(scale)
        target = ctx.vector(xi * self.denom)
        cert, rv = solve_in_span(hw, target)
        if cert is None:
            res = MembershipResult(False, rv, None)
            res._modulus = ctx.mod
            return res
        # collapse the per-(gen, basis) certificate to R-coefficients
        coeffs = []
        for i, g in enumerate(self.gens):
            block = cert[i * ctx.size:(i + 1) * ctx.size]
            coeffs.append(ctx.element(block))
        rhs = tuple(g if scale is None else g * scale for g in self.gens)
        res = MembershipResult(True, ctx.N, tuple(coeffs),
                               xi * self.denom, rhs)
        res._modulus = ctx.mod
        return res

    def scaled_by(self, elem):
        """The ideal elem * self (elem integral)."""
        e = self._intify(elem)
        return FracIdeal(self.ctx, [g * e for g in self.gens], self.denom)

    def __repr__(self):
        d = "" if self.denom.coeffs == {1: 1} else " / denom"
        return f"FracIdeal({len(self.gens)} gens{d})"


def ideal_product(I, J):
    gens = [g * h for g in I.gens for h in J.gens]
    return FracIdeal(I.ctx, gens, I.denom * J.denom)


def ideal_sum(I, J):
    gens = [g * J.denom for g in I.gens] + [h * I.denom for h in J.gens]
    return FracIdeal(I.ctx, gens, I.denom * J.denom)


def ideal_le(I, J):
    """I contained in J, via cross-multiplied memberships of I's gens.

    g/d <= J = (1/f)(h_j) tests g*f in (h_j * d).  Returns the list of
    MembershipResults, one per generator; containment is all(ok).
    """
    out = []
    for g in I.gens:
        out.append(J.membership(g, xi_denom=I.denom))
    return out


def ideal_eq(I, J):
    return all(r.ok for r in ideal_le(I, J)) and \
        all(r.ok for r in ideal_le(J, I))


# ---------------------------------------------------------------------------
# finitely presented modules and their Fitting ideals

MINOR_CAP = 8


@dataclass
class FPModule:
    """Cokernel of right multiplication by ``rows`` (relations) acting
    on R^ngens; ``rows`` may be empty for a free module."""

    ctx: RingCtx
    rows: tuple
    ngens: int

    def __post_init__(self):
        object.__setattr__(self, "rows",
                           tuple(tuple(r) for r in self.rows))
        for r in self.rows:
            if len(r) != self.ngens:
                raise ValueError("relation width mismatch")

    def flat_relations(self):
        return flatten_rows(self.ctx, self.rows)

    def log_cardinality(self):
        """log_p of the cokernel size at precision p^N."""
        ctx = self.ctx
        total = ctx.N * self.ngens * ctx.size
        if not self.rows:
            return total
        hw = howell_form(self.flat_relations(), self.ngens * ctx.size,
                         ctx.p, ctx.N)
        return total - hw.span_log_size()


def _det(ctx, rows):
    """Determinant over R by first-row expansion; minors memoized on the
    surviving column set (row index is forced by the depth)."""
    n = len(rows)
    memo = {}

    def minor(cols):
        r = n - len(cols)
        if len(cols) == 1:
            return rows[r][cols[0]]
        if cols in memo:
            return memo[cols]
        acc = None
        for j, c in enumerate(cols):
            x = rows[r][c]
            if not x.coeffs:
                continue
            sub = minor(cols[:j] + cols[j + 1:])
            term = x * sub
            if j % 2:
                term = -term
            acc = term if acc is None else acc + term
        if acc is None:
            acc = GroupRingElem.zero(ctx.group)
        memo[cols] = acc
        return acc

    return minor(tuple(range(n)))


def fitting_ideal(X: FPModule) -> FracIdeal:
    """Ideal of all ngens x ngens minors of the presentation."""
    g, r = X.ngens, len(X.rows)
    if g == 0:
        return FracIdeal.unit(X.ctx)
    if g > MINOR_CAP:
        raise BoundExceeded(f"{g} generators exceed the {MINOR_CAP}x{MINOR_CAP}"
                            " minor cap")
    if r < g:
        return FracIdeal.zero(X.ctx)
    gens = []
    for rows_sel in itertools.combinations(range(r), g):
        sub = [X.rows[i] for i in rows_sel]
        gens.append(_det(X.ctx, sub))
    return FracIdeal(X.ctx, gens)


# ---------------------------------------------------------------------------
# the shift invariant along square resolutions


@dataclass
class ExactnessReport:
    """Per-joint diagnostics for a claimed resolution.

    ``loss`` is the worst digit loss over the chain checks (vanishing
    composites, kernels against images); determinant defects of the P_i
    are expected arithmetic and live in ``details`` only."""

    loss: int
    details: dict

    @property
    def exact(self):
        return self.loss == 0


def _span_contains(ctx, hw, rows, label, details):
    worst = 0
    for r in rows:
        _, rv = solve_in_span(hw, r)
        if rv < ctx.N:
            worst = max(worst, ctx.N - rv)
    details[label] = worst
    return worst


def _module_map_kernel(ctx, phi_flat, tgt_relation_rows):
    """Generators of {w : w * phi lies in the target relation span},
    as flat vectors over the source's free cover."""
    if not phi_flat:
        return []
    ncols = len(phi_flat[0])
    stacked = [list(r) for r in phi_flat]
    stacked += [[-x % ctx.mod for x in row] for row in tgt_relation_rows]
    hw = howell_form(stacked, ncols, ctx.p, ctx.N, track=True)
    nsrc = len(phi_flat)
    out = []
    for t in hw.kernel:
        w = t[:nsrc]
        if any(w):
            out.append(w)
    return out


def shift_invariant(ps, maps, Y, X, loss_bound=None):
    """Alternating-product shift of the Fitting ideal along a resolution.

    ``ps`` = [P_1, ..., P_d] are FPModules with square presentations;
    ``maps`` = [f_0, ..., f_d] are R-matrices for Y -> P_1 -> ... -> P_d
    -> X (each a tuple of rows over R).  The chain is verified at
    precision: composites vanish, kernels match images up to reported
    digit loss, and span sizes agree.  Result: prod F(P_i)^((-1)^i)
    times F(Y), as a FracIdeal with the odd-position determinants in
    the denominator.  Raises ZeroDivisorDet when a P_i determinant
    vanishes outright at precision and NotExact past ``loss_bound`` or
    on a cover failure.
    """
    if not ps:
        if maps or Y is not X:
            raise ValueError("empty resolution needs Y to be X itself")
        return fitting_ideal(X), ExactnessReport(0, {})
    ctx = ps[0].ctx
    if len(maps) != len(ps) + 1:
        raise ValueError("need one map per arrow, Y through X")
    chain = [Y] + list(ps) + [X]
    details = {}
    loss = 0

    dets = []
    for i, P in enumerate(ps, start=1):
        if len(P.rows) != P.ngens:
            raise ValueError(f"P_{i} presentation is not square")
        d = _det(ctx, P.rows)
        # torsion presentations always have zero-divisor dets at a finite
        # truncation; what cannot be tolerated is a det with no content
        if _is_zero_mod(ctx.element(ctx.vector(d)), ctx.mod) or not d.coeffs:
            raise ZeroDivisorDet(f"det P_{i} vanishes at precision")
        details[f"det_defect[P_{i}]"] = nzd_defect(ctx, d)
        dets.append(d)

    flats = [m.flat_relations() for m in chain]
    hws = [howell_form(f, m.ngens * ctx.size, ctx.p, ctx.N, track=True)
           if f else howell_form([[0] * (m.ngens * ctx.size)],
                                 m.ngens * ctx.size, ctx.p, ctx.N, track=True)
           for f, m in zip(flats, chain)]
    phis = [flatten_rows(ctx, mp) for mp in maps]

    # maps are well defined: source relations land in target relations
    for i, mp in enumerate(maps):
        src, tgt = chain[i], chain[i + 1]
        if src.rows:
            imgs = []
            for rel in src.rows:
                img = [None] * tgt.ngens
                for j in range(tgt.ngens):
                    acc = None
                    for k, x in enumerate(rel):
                        term = x * maps[i][k][j]
                        acc = term if acc is None else acc + term
                    img[j] = acc
                imgs.append(flatten_element_row(ctx, img))
            loss = max(loss, _span_contains(ctx, hws[i + 1], imgs,
                                            f"well_defined[f_{i}]", details))

    # composites vanish in the second target
    for i in range(len(maps) - 1):
        comp = []
        src, mid, tgt = chain[i], chain[i + 1], chain[i + 2]
        for a in range(src.ngens):
            row = []
            for cdx in range(tgt.ngens):
                acc = None
                for b in range(mid.ngens):
                    term = maps[i][a][b] * maps[i + 1][b][cdx]
                    acc = term if acc is None else acc + term
                row.append(acc)
            comp.append(flatten_element_row(ctx, row))
        loss = max(loss, _span_contains(ctx, hws[i + 2], comp,
                                        f"composite[f_{i}f_{i + 1}]", details))

    # exactness joint by joint: ker(next map) vs im(previous) + relations
    for i in range(1, len(chain) - 1):
        mod_i = chain[i]
        ker = _module_map_kernel(ctx, phis[i], hws[i + 1].rows)
        im_rows = phis[i - 1]  # R-span of the images: all sigma translates
        width = mod_i.ngens * ctx.size
        im_span = howell_form(im_rows + flats[i] if flats[i] else im_rows,
                              width, ctx.p, ctx.N, track=True)
        loss = max(loss, _span_contains(ctx, im_span, ker,
                                        f"ker_in_im[{i}]", details))
        ker_span = howell_form(ker + flats[i] if flats[i] else ker,
                               width, ctx.p, ctx.N, track=True)
        im_only = howell_form(im_rows + (flats[i] or []), width, ctx.p, ctx.N)
        details[f"span_log[{i}]"] = (ker_span.span_log_size(),
                                     im_only.span_log_size())

    # surjectivity onto X: images of P_d generators plus X relations fill R^g
    full = howell_form(phis[-1] + (flats[-1] or []), X.ngens * ctx.size,
                       ctx.p, ctx.N)
    cover = full.span_log_size()
    want = ctx.N * X.ngens * ctx.size
    details["cover_log"] = (cover, want)
    if cover != want:
        raise NotExact(f"last map covers p^{cover} of p^{want}")

    if loss_bound is not None and loss > loss_bound:
        raise NotExact(f"digit loss {loss} exceeds bound {loss_bound}")

    FY = fitting_ideal(Y)
    num_scale = ctx.one()
    den = FY.denom
    for i, d in enumerate(dets, start=1):
        if i % 2:
            den = den * d
        else:
            num_scale = num_scale * d
    gens = [g * num_scale for g in FY.gens]
    return FracIdeal(ctx, gens, den), ExactnessReport(loss, details)


# ---------------------------------------------------------------------------
# the star condition: p-torsion of reductions by exhaustive enumeration

POINT_BOUND = 60000


class _GF:
    """F_l or F_{l^2}; quadratic extension by a non-residue root."""

    def __init__(self, l, deg):
        self.l, self.deg = l, deg
        if deg == 2:
            r = next(r for r in range(2, l)
                     if pow(r, (l - 1) // 2, l) == l - 1)
            self.r = r

    def elements(self):
        if self.deg == 1:
            return (tuple([a]) for a in range(self.l))
        return ((a, b) for a in range(self.l) for b in range(self.l))

    def add(self, x, y):
        return tuple((a + b) % self.l for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple((a - b) % self.l for a, b in zip(x, y))

    def mul(self, x, y):
        if self.deg == 1:
            return (x[0] * y[0] % self.l,)
        a, b = x
        c, d = y
        return ((a * c + self.r * b * d) % self.l, (a * d + b * c) % self.l)

    def scal(self, n, x):
        return tuple(n * a % self.l for a in x)

    def inv(self, x):
        if self.deg == 1:
            return (pow(x[0], -1, self.l),)
        a, b = x
        n = (a * a - self.r * b * b) % self.l
        ni = pow(n, -1, self.l)
        return (a * ni % self.l, -b * ni % self.l)

    def zero(self):
        return (0,) * self.deg

    def one(self):
        return (1,) + (0,) * (self.deg - 1)


def _p_torsion_count(E: CurveData, l, deg, p):
    """Number of p-torsion points of E over F_{l^deg}, enumerated."""
    if l ** deg > POINT_BOUND:
        raise BoundExceeded(f"l^deg = {l ** deg} beyond the enumeration bound")
    if E.conductor % l == 0:
        raise ValueError("bad reduction prime")
    F = _GF(l, deg)
    # short form y^2 = x^3 - 27 c4 x - 54 c6 (valid away from 2 and 3)
    A = F.scal(-27 * E.c4 % l, F.one())
    B = F.scal(-54 * E.c6 % l, F.one())
    roots = {}
    for y in F.elements():
        roots.setdefault(F.mul(y, y), []).append(y)

    def on_curve_pts():
        for x in F.elements():
            z = F.add(F.mul(F.mul(x, x), x), F.add(F.mul(A, x), B))
            for y in roots.get(z, []):
                yield (x, y)

    def add_pts(P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if F.add(y1, y2) == F.zero():
                return None
            num = F.scal(3, F.mul(x1, x1))
            num = F.add(num, A)
            lam = F.mul(num, F.inv(F.scal(2, y1)))
        else:
            lam = F.mul(F.sub(y2, y1), F.inv(F.sub(x2, x1)))
        x3 = F.sub(F.sub(F.mul(lam, lam), x1), x2)
        y3 = F.sub(F.mul(lam, F.sub(x1, x3)), y1)
        return (x3, y3)

    def mul_pt(k, P):
        R, Q = None, P
        while k:
            if k & 1:
                R = add_pts(R, Q)
            Q = add_pts(Q, Q)
            k >>= 1
        return R

    count = 1  # the origin
    for P in on_curve_pts():
        if mul_pt(p, P) is None:
            count += 1
    return count


@dataclass
class StarVerdict:
    l: int
    a_l: int
    case: str          # "unconstrained" | "a_l=2" | "a_l=-2"
    torsion: int | None
    ok: bool


def star_condition(E: CurveData, p: int, m: int):
    """Per-prime verdicts for the torsion criterion on l | m.

    Only l = 1 mod p can fail: with a_l = 2 mod p the criterion needs
    E(F_l)[p] != p^2, and with a_l = -2 mod p and even residue degree
    it needs E(F_{l^2})[p] != p^2.
    """
    out = []
    for l in sorted(set(_prime_factors(m))):
        if E.conductor % l == 0:
            raise ValueError(f"l = {l} divides the conductor")
        a_l = count_points(E, l)
        if l % p != 1:
            out.append(StarVerdict(l, a_l, "unconstrained", None, True))
            continue
        if a_l % p == 2 % p:
            t = _p_torsion_count(E, l, 1, p)
            out.append(StarVerdict(l, a_l, "a_l=2", t, t != p * p))
        elif a_l % p == (-2) % p:
            e = vp(m, l)
            rest = m // l ** e
            degree = 1 if rest == 1 else _mult_order(l, rest)
            if degree % 2 == 0:
                t = _p_torsion_count(E, l, 2, p)
                out.append(StarVerdict(l, a_l, "a_l=-2", t, t != p * p))
            else:
                out.append(StarVerdict(l, a_l, "a_l=-2", None, True))
        else:
            out.append(StarVerdict(l, a_l, "unconstrained", None, True))
    return out


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _mult_order(a, n):
    o, x = 1, a % n
    while x != 1:
        x = x * a % n
        o += 1
        if o > n:
            raise ArithmeticError("order overflow")
    return o


# ---------------------------------------------------------------------------
# the local H^0 ideal at a ramified prime (shifted degree -1)


def sf_minus_one_ideal(E: CurveData, l: int, m: int, p: int, n: int, N: int,
                       frobenius_matrix=None):
    """The degree -1 shift at l | m: (1, nu_{m,(l)} P_l^{-1} J) with J the
    entry ideal of sigma_l - Frobenius together with l - 1.

    The canonical lift of sigma_l into G_{m,n} is the CRT class that is
    l away from l and 1 at l; the generators pair every J-generator
    with the norm element, which removes the lift ambiguity.  With no
    matrix given, J is settled mod p where possible (l != 1 mod p gives
    the unit ideal at full precision since l - 1 is then a unit) and
    MatrixRequired is raised in the genuinely ambiguous cases.
    """
    if m % l:
        raise ValueError("l must divide m")
    e = vp(m, l)
    G = GaloisGroup.get(p, m, n)
    Gq = GaloisGroup.get(p, m // l ** e, n)
    ctx = RingCtx.get(G, N)
    a_l = count_points(E, l)
    nu = norm_element(G, "inertia", l)

    # P_l at the quotient level, lifted along the canonical section
    Pq = _euler_elem(Gq, l, a_l, good=E.conductor % l != 0)
    Pbar = _lift_elem(Pq, Gq, G)

    if frobenius_matrix is not None:
        x1, x2, x3, x4 = frobenius_matrix
        mod = p ** N
        if (x1 + x4 - a_l) % mod or (x1 * x4 - x2 * x3 - l) % mod:
            raise ValueError("matrix trace/determinant do not match a_l, l")
        sig = GroupRingElem.sigma(Gq, l, 1)
        J = [sig - ctx_scalar(Gq, x1, N), ctx_scalar(Gq, x2, N),
             ctx_scalar(Gq, x3, N), sig - ctx_scalar(Gq, x4, N),
             ctx_scalar(Gq, l - 1, N)]
        tag = "matrix"
    elif l % p != 1:
        J = [GroupRingElem.sigma(Gq, 1, 1)]  # l - 1 is a unit
        tag = "unit_by_l-1"
    else:
        # mod-p classification via the p-torsion of the reduction
        if a_l % p == 2 % p and _p_torsion_count(E, l, 1, p) == p * p:
            if N > 1:
                raise MatrixRequired("scalar Frobenius case needs the matrix "
                                     "beyond one digit")
            sig = GroupRingElem.sigma(Gq, l, 1)
            J = [sig - ctx_scalar(Gq, 1, N), ctx_scalar(Gq, l - 1, N)]
            tag = "scalar_frobenius_mod_p"
        elif a_l % p == (-2) % p and \
                _p_torsion_count(E, l, 2, p) == p * p:
            if N > 1:
                raise MatrixRequired("minus-scalar Frobenius case needs the "
                                     "matrix beyond one digit")
            sig = GroupRingElem.sigma(Gq, l, 1)
            J = [sig + ctx_scalar(Gq, 1, N), ctx_scalar(Gq, l - 1, N)]
            tag = "minus_scalar_frobenius_mod_p"
        else:
            J = [GroupRingElem.sigma(Gq, 1, 1)]
            tag = "unit_by_torsion"
    gens = [Pbar] + [nu * _lift_elem(j, Gq, G) for j in J]
    return FracIdeal(ctx, gens, Pbar), tag


def ctx_scalar(group, c, N):
    return GroupRingElem.sigma(group, 1, c % group.p ** N)


def _euler_elem(group, l, a_l, good):
    """(l - a_l sigma_l + 1_good sigma_l^2) / l cleared of denominators:
    the ideal only needs P_l up to the unit l."""
    sig = GroupRingElem.sigma(group, l, 1)
    out = GroupRingElem.sigma(group, 1, l) - sig.scale(a_l)
    if good:
        out = out + (sig * sig)
    return out


def _crt_lift(a, le, rest):
    # the class that is a mod rest and 1 mod le
    inv = pow(le, -1, rest)
    return (1 + le * ((a - 1) * inv % rest)) % (le * rest)


def _lift_elem(xi, Gq, G):
    return GroupRingElem(G, {_crt_lift(a, G.M // Gq.M, Gq.M): c
                             for a, c in xi.coeffs.items()})


# ---------------------------------------------------------------------------
# containment of the theta ideal in a Selmer candidate's Fitting ideal


def parse_group_ring_json(group, data, N):
    mod = group.p ** N
    if int(data["modulus"]) != group.M:
        raise ValueError("group modulus mismatch")
    coeffs = {}
    for a, s in data["coeffs"].items():
        fr = Fraction(s) if isinstance(s, str) else Fraction(int(s))
        if fr.denominator % group.p == 0:
            raise IntegralityFailure("candidate entries must be p-integral")
        coeffs[int(a)] = fr.numerator * pow(fr.denominator, -1, mod) % mod
    return GroupRingElem(group, coeffs)


def parse_selmer_candidate(data, p, N, group):
    """{"group_modulus": M, "pN": [p, N], "matrix": [[elem, ...], ...]}
    with group-ring elements in the modulus/coeffs JSON form."""
    if tuple(data.get("pN", ())) != (p, N):
        raise ValueError("candidate pN tag does not match the run")
    if int(data["group_modulus"]) != group.M:
        raise ValueError("candidate modulus does not match the level")
    rows = [tuple(parse_group_ring_json(group, e, N) for e in row)
            for row in data["matrix"]]
    if not rows:
        raise ValueError("empty presentation")
    return FPModule(RingCtx.get(group, N), rows, len(rows[0]))


def mt_containment(E: CurveData, p: int, m: int, n: int, N: int,
                   candidate=None, bits: int = 128):
    """Containment of (theta_{m,n}, nu theta_{m,n-1}) in a Fitting ideal.

    With ``candidate`` (parsed Selmer JSON) the target is the candidate's
    Fitting ideal; without it the target is the analytic ideal of the
    appropriate decomposition flavor.  Returns (ok, results, target)
    where results maps generator names to MembershipResults.
    """
    from . import decomp  # deferred: decomp pulls the solver from here

    G = GaloisGroup.get(p, m, n)
    ctx = RingCtx.get(G, N)
    th_n = decomp.theta_elem(E, m, n, p, bits)
    th_prev = decomp.theta_elem(E, m, n - 1, p, bits)
    nu_prev = th_prev.norm_lift(G.M)
    scale = max(_p_denom_exp(th_n, p), _p_denom_exp(nu_prev, p))
    gen_n = _mt_to_elem(ctx, th_n.scale(p ** scale))
    gen_prev = _mt_to_elem(ctx, nu_prev.scale(p ** scale))

    if candidate is not None:
        target = fitting_ideal(parse_selmer_candidate(candidate, p, N, G))
    else:
        target = decomp.analytic_containment_ideal(E, p, m, n, N, bits)
    results = {
        "theta[n]": target.membership(gen_n, xi_denom=p ** scale),
        "nu_theta[n-1]": target.membership(gen_prev, xi_denom=p ** scale),
    }
    ok = all(r.ok for r in results.values())
    return ok, results, target


def _p_denom_exp(theta, p):
    e = 0
    for c in theta.coeffs.values():
        e = max(e, vp(Fraction(c).denominator, p))
    return e


def _mt_to_elem(ctx, theta):
    return GroupRingElem(ctx.group,
                         {a: ctx.coerce(c) for a, c in theta.coeffs.items()})
