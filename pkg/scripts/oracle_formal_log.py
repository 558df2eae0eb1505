"""Independent oracle for the formal-group logarithm coefficients.

Solves the curve equation for w = 1/y as a series in t = x/y order by order
with sympy, expands the normalized invariant differential dx/(2y + a1 x + a3),
and reads off the integrated coefficients.  Separate code path from the
library's integer series recursion.

Run:  python scripts/oracle_formal_log.py
"""
import sympy as sp

t = sp.symbols("t")


def series_log(avals, D):
    a1, a2, a3, a4, a6 = [sp.sympify(a) for a in avals]
    prec = D + 4
    w = t ** 3
    for _ in range(prec):
        w = sp.expand(t ** 3 + a2 * t ** 2 * w + a4 * t * w ** 2
                      + a6 * w ** 3 - a1 * t * w - a3 * w ** 2)
        w = sum(w.coeff(t, j) * t ** j for j in range(prec))
    wp = sp.expand(sp.diff(w, t))
    num = sp.expand(w - t * wp)
    den = sp.expand(w * (2 + a1 * t + a3 * w))
    num = sum(num.coeff(t, j + 3) * t ** j for j in range(prec - 3))
    den = sum(den.coeff(t, j + 3) * t ** j for j in range(prec - 3))
    ser = [sp.S(0)] * (prec - 3)
    d0 = den.coeff(t, 0)
    for i in range(prec - 3):
        acc = num.coeff(t, i)
        for j in range(1, i + 1):
            acc -= ser[i - j] * den.coeff(t, j)
        ser[i] = sp.expand(acc / d0)
    ser = [sp.expand(c / ser[0]) for c in ser]
    return [sp.expand(ser[j - 1]) for j in range(1, D + 1)]


def main():
    syms = sp.symbols("a1 a2 a3 a4 a6")
    gen = series_log(syms, 3)
    print("generic:  a_1 =", gen[0], "  a_2 =", gen[1], "  a_3 =", gen[2])
    assert gen[0] == 1 and gen[1] == -syms[0]
    for label, av in {"11a1": (0, -1, 1, -10, -20),
                      "37a1": (0, 0, 1, -1, 0),
                      "17a1": (1, -1, 1, -1, -14)}.items():
        vals = series_log(av, 8)
        assert all(v.is_Integer for v in vals)
        print(f"{label}: {[int(v) for v in vals]}")


if __name__ == "__main__":
    main()
