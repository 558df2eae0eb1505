"""Decide the twisted functional-equation root number by rationality.

For prime M the theta coefficients c_a must come out rational.  Compute
them under four candidate conventions eps(psi) = w * X * tau(psi)^2 / M
with X in {psi(-N), conj(psi(N)), psi(N), conj(psi(-N))} and see which
convention yields rationals.  Run for 11a1 at M = 5 and M = 7.
"""

import os
import sys
from fractions import Fraction

import mpmath as mp

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from oracle_analytic import CURVES, an_list, periods

mp.mp.dps = 40


def run(label, M, g):
    curve = CURVES[label]
    a1, a2, a3, a4, a6, N = curve
    w = -1 if label == "37a1" else 1
    om_re, om_im, _ = periods(a1, a2, a3, a4, a6)
    phiM = M - 1
    dl, x = {}, 1
    for k in range(phiM):
        dl[x] = k
        x = x * g % M

    c = 2 * mp.pi / (M * mp.sqrt(N))
    K = int(80 / c) + 200
    an = an_list(curve, K)
    S = [mp.mpf(0)] * M
    for n in range(1, K + 1):
        if an[n]:
            S[n % M] += mp.mpf(an[n]) / n * mp.e ** (-c * n)

    c1 = 2 * mp.pi / mp.sqrt(N)
    K1 = int(80 / c1) + 200
    an1 = an_list(curve, K1)
    L1 = (1 + w) * sum(mp.mpf(an1[n]) / n * mp.e ** (-c1 * n)
                       for n in range(1, K1 + 1))

    def psi_j(j, a):
        a %= M
        if a not in dl:
            return mp.mpc(0)
        return mp.expjpi(2 * mp.mpf(j * dl[a]) / phiM)

    a_M = an[M]
    for conv in ("psi(-N)", "conj(psi(N))", "psi(N)", "conj(psi(-N))"):
        V = {0: (a_M - 1 - 1) * L1 / om_re}
        for j in range(1, phiM):
            tau = sum(psi_j(j, a) * mp.expjpi(2 * mp.mpf(a) / M)
                      for a in range(1, M))
            taubar = sum(mp.conj(psi_j(j, a)) * mp.expjpi(2 * mp.mpf(a) / M)
                         for a in range(1, M))
            s1 = sum(psi_j(j, r) * S[r] for r in range(1, M))
            s2 = sum(mp.conj(psi_j(j, r)) * S[r] for r in range(1, M))
            X = {"psi(-N)": psi_j(j, -N), "conj(psi(N))": mp.conj(psi_j(j, N)),
                 "psi(N)": psi_j(j, N),
                 "conj(psi(-N))": mp.conj(psi_j(j, -N))}[conv]
            eps = w * X * tau ** 2 / M
            L = s1 + eps * s2
            om = om_re if j % 2 == 0 else mp.mpc(0, om_im)
            V[j] = taubar * L / om
        print(f"{label} M={M}  convention {conv}:")
        for a in range(1, M):
            ca = sum(V[j] * mp.conj(psi_j(j, a)) for j in range(phiM)) / phiM
            re = float(ca.real)
            fr = Fraction(re).limit_denominator(5000)
            res = abs(re - float(fr))
            print(f"  c_{a} = {mp.nstr(ca, 12)}  ~ {fr}  "
                  f"(res {res:.2e}, |im| {float(abs(ca.imag)):.2e})")


if __name__ == "__main__":
    run("11a1", 5, 2)
    run("11a1", 7, 3)
