"""Equivariant Iwasawa-theoretic computations for elliptic curves.

Modules:
    curve        curve data, point counts, prime classification
    padic        p-adic scalars, quadratic and cyclotomic semilocal rings
    groupring    finite abelian Galois groups, group rings, characters
    analytic     periods, Gauss sums, twisted L-values, theta elements
    localpoints  norm-compatible local point systems and their trace laws
    decomp       stabilizations, Log matrices, plus/minus and sharp/flat splits
    fitting      Howell forms, Fitting ideals, containment certificates
    cli          command-line front door
"""

__version__ = "0.1.0"
