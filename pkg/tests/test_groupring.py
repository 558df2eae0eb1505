"""Group ring, Iwasawa polynomial, and Dirichlet character tests."""

import random
from fractions import Fraction
from math import gcd

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elliwa.curve import PrimeClass
from elliwa.groupring import (
    BadBullet,
    BadSubgroup,
    CharGroup,
    DirichletChar,
    GaloisGroup,
    GroupRingElem,
    IwasawaPoly,
    UnsupportedCharacter,
    W_ideal,
    char_eval,
    norm_element,
    norm_lift,
    omega_family,
    one_plus_T_pow,
    phi_poly,
    project_z,
    tame_polys_to_elem,
    to_tame_polys,
)
from elliwa.padic import CycloRing, PadicScalar


def euler_phi(M):
    return len([a for a in range(1, M + 1) if gcd(a, M) == 1])


# ---------------------------------------------------------------------------
# groups


def test_group_splitting_5_2():
    G = GaloisGroup.get(3, 5, 2)
    assert G.M == 5 * 27 and G.order == euler_phi(135)
    assert G.gamma % 5 == 1 and G.gamma % 27 == 4
    assert pow(G.gamma, 9, G.M) == 1 and pow(G.gamma, 3, G.M) != 1
    for a in G.elements:
        a0, e = G.decompose(a)
        assert a0 == a % 15 and 0 <= e < 9
        assert G.compose(a0, e) == a


def test_group_level_minus_one():
    G = GaloisGroup.get(3, 20, -1)
    assert G.M == 20 and G.gamma == 1
    assert all(G.decompose(a) == (a, 0) for a in G.elements)
    with pytest.raises(BadSubgroup):
        G.delta_elements()


@given(st.sampled_from([(3, 1), (3, 2), (3, 4), (3, 5), (5, 1), (5, 4), (5, 12)]),
       st.integers(min_value=0, max_value=2))
@settings(max_examples=25, deadline=None)
def test_group_decompose_roundtrip(pm, n):
    p, m = pm
    G = GaloisGroup.get(p, m, n)
    for a in G.elements:
        a0, e = G.decompose(a)
        assert G.compose(a0, e) == a
        # the tame section lands in the prime-to-p-order part
        s = G.compose(a0, 0)
        assert pow(s, G.order // p ** G.n if G.n else G.order, G.M) is not None


def test_delta_elements():
    G = GaloisGroup.get(3, 1, 1)
    delta = G.delta_elements()
    assert len(delta) == 2 and 1 in delta
    # the nontrivial lift squares to 1 and reduces to 2 mod 3
    other = [d for d in delta if d != 1][0]
    assert other % 3 == 2 and pow(other, 2, 9) == 1


# ---------------------------------------------------------------------------
# ring operations, involution, norms


def _random_elem(G, rng, span=6):
    coeffs = {}
    for _ in range(span):
        a = rng.choice(G.elements)
        coeffs[a] = coeffs.get(a, Fraction(0)) + Fraction(rng.randint(-9, 9))
    return GroupRingElem(G, coeffs)


def test_involution_basics():
    G = GaloisGroup.get(3, 5, 1)
    rng = random.Random(7)
    xi = _random_elem(G, rng)
    assert xi.involution().involution().coeffs == xi.coeffs
    a = 7
    assert GroupRingElem.sigma(G, a).involution().support() == [pow(a, -1, G.M)]
    nd = norm_element(G, "delta")
    assert nd.involution().coeffs == nd.coeffs


def test_norm_element_square():
    # nu_{m,(l)}^2 = l^(e-1) (l-1) nu_{m,(l)}
    G = GaloisGroup.get(3, 5, 0)
    nu = norm_element(G, "inertia", 5)
    assert (nu * nu).coeffs == nu.scale(Fraction(4)).coeffs
    G2 = GaloisGroup.get(3, 25, 0)
    nu2 = norm_element(G2, "inertia", 5)
    assert (nu2 * nu2).coeffs == nu2.scale(Fraction(20)).coeffs


def test_norm_trivial_subgroup():
    G = GaloisGroup.get(3, 5, 1)
    assert norm_element(G, "level", (5, 1)).support() == [1]


def test_norm_then_project_is_index():
    G_small = GaloisGroup.get(3, 5, 0)
    G_big = GaloisGroup.get(3, 5, 1)
    rng = random.Random(11)
    xi = _random_elem(G_small, rng)
    back = project_z(norm_lift(xi, G_big), G_small)
    assert back.coeffs == xi.scale(Fraction(3)).coeffs
    # m-direction
    G_big2 = GaloisGroup.get(3, 20, 0)
    back2 = project_z(norm_lift(xi, G_big2), G_small)
    assert back2.coeffs == xi.scale(Fraction(2)).coeffs


@given(st.integers(min_value=0, max_value=97))
@settings(max_examples=40, deadline=None)
def test_project_z_ring_hom(seed):
    rng = random.Random(seed)
    G = GaloisGroup.get(3, 4, 1)
    small = GaloisGroup.get(3, 4, 0)
    xi, eta = _random_elem(G, rng), _random_elem(G, rng)
    lhs = project_z(xi * eta, small)
    rhs = project_z(xi, small) * project_z(eta, small)
    assert lhs.coeffs == {a: c for a, c in rhs.coeffs.items()}


def test_norm_element_bad_specs():
    G = GaloisGroup.get(3, 5, 0)
    with pytest.raises(BadSubgroup):
        norm_element(G, "inertia", 7)
    with pytest.raises(BadSubgroup):
        norm_element(G, "level", (5, 2))
    with pytest.raises(BadSubgroup):
        norm_element(G, "nonsense")


# ---------------------------------------------------------------------------
# Iwasawa polynomials


def test_omega_family_small():
    fam = omega_family(3, 10, 0)
    one = IwasawaPoly.constant(3, 10, 1)
    T = IwasawaPoly(3, 10, [0, 1])
    assert fam["omega_tilde_plus"] == one and fam["omega_tilde_minus"] == one
    assert fam["omega_plus"] == T and fam["omega_minus"] == T
    assert phi_poly(3, 10, 1) == IwasawaPoly(3, 10, [3, 3, 1])


@pytest.mark.parametrize("p,nmax", [(3, 5), (5, 4)])
def test_omega_factorization(p, nmax):
    # omega~_n^{+-} omega_n^{-+} = omega_n, exactly
    N = 8
    for n in range(0, nmax + 1):
        fam = omega_family(p, N, n)
        prod_pm = fam["omega_tilde_plus"] * fam["omega_minus"]
        prod_mp = fam["omega_tilde_minus"] * fam["omega_plus"]
        assert prod_pm == fam["omega"]
        assert prod_mp == fam["omega"]


def test_omega_annihilates_level():
    # image of omega_n under T -> gamma - 1 is zero in the group ring
    for (p, m, n) in [(3, 1, 1), (3, 5, 2), (5, 4, 1)]:
        G = GaloisGroup.get(p, m, n)
        fam = omega_family(p, 12, n)
        img = fam["omega"].to_group_ring(G)
        assert all(c % p ** 12 == 0 for c in img.coeffs.values())


def test_phi_high_factors_are_p_mod_omega():
    # Phi_j(1+T) = p mod omega_n for j > n: the tail collapse behind
    # every truncated logarithm matrix
    p, N, n = 3, 9, 2
    for j in range(n + 1, n + 3):
        phi = phi_poly(p, N, j)
        red = IwasawaPoly(p, N, phi.coeffs, level=n)
        assert red == IwasawaPoly.constant(p, N, p, level=n)


def test_tame_poly_roundtrip():
    G = GaloisGroup.get(3, 4, 2)
    rng = random.Random(3)
    coeffs = {rng.choice(G.elements): rng.randint(-50, 50) for _ in range(10)}
    xi = GroupRingElem(G, coeffs)
    N = 12
    polys = to_tame_polys(xi, N)
    back = tame_polys_to_elem(G, polys, N)
    mod = 3 ** N
    for a in set(xi.coeffs) | set(back.coeffs):
        assert (xi.coeffs.get(a, 0) - back.coeffs.get(a, 0)) % mod == 0


def test_to_group_ring_is_multiplicative():
    p, N = 3, 8
    G = GaloisGroup.get(p, 1, 2)
    f = IwasawaPoly(p, N, [2, 0, 1, 5])
    g = IwasawaPoly(p, N, [1, 4, 0, 0, 7])
    lhs = (f * g).to_group_ring(G)
    rhs = f.to_group_ring(G) * g.to_group_ring(G)
    mod = p ** N
    for a in set(lhs.coeffs) | set(rhs.coeffs):
        assert (lhs.coeffs.get(a, 0) - rhs.coeffs.get(a, 0)) % mod == 0


# ---------------------------------------------------------------------------
# characters


def test_char_count_and_orders():
    for M in [1, 2, 3, 4, 8, 12, 15, 16, 45]:
        chars = list(CharGroup.get(M).chars())
        assert len(chars) == euler_phi(M)
        for chi in chars:
            o = chi.order
            assert all((chi.value_exponent(a) * o) % 1 == 0
                       for a in range(1, M + 1) if gcd(a, M) == 1)


def test_char_conductors():
    # quadratic mod 8
    chars8 = [c for c in CharGroup.get(8).chars() if c.order == 2]
    assert sorted(c.conductor for c in chars8) == [4, 8, 8]
    # mod 15: the quartic 5-part alone gives conductor 5, with the
    # quadratic 3-part attached it becomes 15
    quartics = [c for c in CharGroup.get(15).chars() if c.order == 4]
    assert sorted(c.conductor for c in quartics) == [5, 5, 15, 15]
    # mod 16 quartics are primitive
    q16 = [c for c in CharGroup.get(16).chars() if c.order == 4]
    assert q16 and all(c.conductor == 16 for c in q16)
    trivial = DirichletChar(15, (0, 0))
    assert trivial.conductor == 1 and trivial.order == 1


def test_char_primitive_match():
    chi = next(c for c in CharGroup.get(15).chars()
               if c.order == 4 and c.conductor == 5)
    prim = chi.primitive()
    assert prim.M == 5
    for a in range(1, 15):
        if gcd(a, 15) == 1:
            assert prim.value_exponent(a % 5) == chi.value_exponent(a)


def test_char_orthogonality_complex():
    mpmath.mp.prec = 80
    for chi in CharGroup.get(15).chars():
        s = sum(chi.eval_complex(a, mpmath.mp)
                for a in range(1, 15) if gcd(a, 15) == 1)
        target = 8 if chi.order == 1 else 0
        assert abs(s - target) < 1e-18


def test_char_eval_padic_values():
    # order-4 character mod 5 at p=5: values are Teichmueller units
    chi = next(c for c in CharGroup.get(5).chars() if c.order == 4)
    v2 = chi.eval_padic(2, 5, 10)
    sq = v2 * v2
    assert (sq * sq - PadicScalar.from_int(1, 5, 10)).is_zero
    assert not (sq - PadicScalar.from_int(1, 5, 10)).is_zero
    with pytest.raises(UnsupportedCharacter):
        chi.eval_padic(2, 3, 10)


def test_char_eval_cyclo_wild():
    # order-3 character of conductor 9 needs the wild leg
    chi = next(c for c in CharGroup.get(9).chars() if c.order == 3)
    assert chi.conductor == 9
    ring = CycloRing.get(3, 8, 1, 2)
    vals = {a: chi.eval_cyclo(a, ring) for a in range(1, 9) if a % 3}
    s = ring.zero()
    for v in vals.values():
        s = s + v
        assert (v * v * v - ring.one()).is_zero_at_precision()
    assert s.is_zero_at_precision()


def test_char_eval_group_ring():
    G = GaloisGroup.get(3, 5, 0)
    rng = random.Random(23)
    xi = _random_elem(G, rng)
    trivial = DirichletChar(15, (0, 0))
    assert char_eval(xi, trivial, ("padic", 3, 12)).lift() == \
        int(xi.augmentation()) % 3 ** 12 or \
        xi.augmentation().denominator != 1
    # nu_{5,(5)} evaluates to the subgroup order off its conductor, 0 on it
    nu = norm_element(G, "inertia", 5)
    chi5 = next(c for c in CharGroup.get(15).chars()
                if c.conductor == 5 and c.order == 2)
    chi3 = next(c for c in CharGroup.get(15).chars() if c.conductor == 3)
    mpmath.mp.prec = 64
    assert abs(char_eval(nu, chi5, "complex")) < 1e-15
    assert abs(char_eval(nu, chi3, "complex") - 4) < 1e-15
    v = char_eval(nu, chi3, ("padic", 3, 10))
    assert (v - PadicScalar.from_int(4, 3, 10)).is_zero


@given(st.integers(min_value=0, max_value=60))
@settings(max_examples=30, deadline=None)
def test_char_eval_multiplicative(seed):
    rng = random.Random(seed)
    G = GaloisGroup.get(3, 4, 0)
    xi, eta = _random_elem(G, rng, 4), _random_elem(G, rng, 4)
    chi = next(c for c in CharGroup.get(12).chars()
               if c.conductor == 12)
    lhs = char_eval(xi * eta, chi, ("padic", 3, 14))
    rhs = char_eval(xi, chi, ("padic", 3, 14)) * \
        char_eval(eta, chi, ("padic", 3, 14))
    assert (lhs - rhs).is_zero


def test_char_involution_vs_inverse():
    G = GaloisGroup.get(3, 5, 0)
    rng = random.Random(5)
    xi = _random_elem(G, rng)
    chi = next(c for c in CharGroup.get(15).chars() if c.order == 4)
    mpmath.mp.prec = 80
    lhs = char_eval(xi.involution(), chi, "complex")
    rhs = char_eval(xi, chi.inverse(), "complex")
    assert abs(lhs - rhs) < 1e-20


def test_gamma_substitution_matches_group_char():
    # psi(poly(T -> gamma-1)) = poly(psi(gamma) - 1) for a wild character
    p, N, n = 3, 8, 1
    G = GaloisGroup.get(p, 1, n)
    chi = next(c for c in CharGroup.get(9).chars() if c.order == 3)
    ring = CycloRing.get(3, N, 1, n + 1)
    poly = IwasawaPoly(p, N, [1, 2, 0, 4])
    img = poly.to_group_ring(G)
    lhs = char_eval(img.map_coeffs(Fraction), chi, ring)
    x = chi.eval_cyclo(G.gamma, ring) - ring.one()
    rhs = poly.substitute(x, ring.one())
    assert (lhs - rhs).is_zero_at_precision()


# ---------------------------------------------------------------------------
# W ideals


def _pc(p, a_p, kind, bullets):
    return PrimeClass(p=p, a_p=a_p, kind=kind, bullets=frozenset(bullets))


def test_W_ideal_cases():
    G = GaloisGroup.get(3, 1, 1)
    ss0 = _pc(3, 0, "supersingular_zero", {"plus", "minus", "sharp", "flat"})
    ssn = _pc(3, -3, "supersingular_nonzero",
              {"plus", "minus", "sharp", "flat"})
    ordi = _pc(5, 1, "ordinary", {"plain"})
    G5 = GaloisGroup.get(5, 1, 1)

    assert [g.support() for g in W_ideal(G, "plus", ss0)] == [[1]]
    assert [g.support() for g in W_ideal(G, "flat", ssn)] == [[1]]
    assert [g.support() for g in W_ideal(G, "sharp", ssn)] == [[1]]
    assert [g.support() for g in W_ideal(G5, "plain", ordi)] == [[1]]

    gens = W_ideal(G, "minus", ss0)
    assert len(gens) == 2
    assert gens[0].coeffs == norm_element(G, "delta").coeffs
    assert gens[1].coeff(G.gamma) == 1 and gens[1].coeff(1) == -1
    sharp = W_ideal(G, "sharp", ss0)
    assert sharp[0].coeffs == gens[0].coeffs

    with pytest.raises(BadBullet):
        W_ideal(G5, "sharp", ordi)
    with pytest.raises(BadBullet):
        W_ideal(G, "minus", ssn)
