"""Class-level arithmetic on the flat torus.

Constant hermitian matrices represent (1,1)-classes; the Kahler cone is the
positive-definite cone and intersection numbers reduce to mixed discriminants.
All volumes are normalized so that the top self-intersection of a class equals
the determinant of its matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .geometry import HERMITIAN_TOL

VANISHING_RTOL = 1e-12

S_FLOOR = 1e-15
S_BISECT_TOL = 1e-12


def as_class_matrix(matrix, n=None):
    """Validate and return an n-by-n hermitian matrix as a complex array."""
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"class matrix must be square, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise ValueError(f"class matrix must be {n}x{n}, got {a.shape[0]}x{a.shape[0]}")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL * scale:
        raise ValueError("class matrix is not hermitian")
    return a


@dataclass(frozen=True)
class CohomologyClass:
    """A (1,1)-class given by its constant hermitian coefficient matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_class_matrix(self.matrix))

    @property
    def n(self):
        return self.matrix.shape[0]

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def is_kahler(self, tol=0.0):
        return self.min_eigenvalue() > tol

    def is_nef(self, tol=VANISHING_RTOL):
        return self.min_eigenvalue() >= -tol

    def volume(self):
        return float(np.linalg.det(self.matrix).real)


def _coerce(a):
    return a.matrix if isinstance(a, CohomologyClass) else as_class_matrix(a)


def class_path(L, omega0, t):
    """Evolving class L + e^{-t} (omega0 - L) as a matrix."""
    Lm, Wm = _coerce(L), _coerce(omega0)
    if Lm.shape != Wm.shape:
        raise ValueError("class dimensions disagree")
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return Lm + math.exp(-t) * (Wm - Lm)


def kahler_check(A) -> bool:
    """True iff the class is in the open Kahler cone (positive definite)."""
    return float(np.linalg.eigvalsh(_coerce(A))[0]) > 0.0


def _pencil_min_eig(Lm, Mm):
    def ev(s):
        return float(np.linalg.eigvalsh(Lm + s * Mm)[0])
    return ev


def singularity_time(L, omega0):
    """Supremum of t with the evolving class positive definite.

    The smallest eigenvalue of the pencil is concave in s = e^{-t}, so with a
    positive start at s = 1 there is at most one sign change below it; bisection
    to S_BISECT_TOL in s locates it.  Returns math.inf when the pencil stays
    positive down to S_FLOOR.
    """
    Lm, Wm = _coerce(L), _coerce(omega0)
    if Lm.shape != Wm.shape:
        raise ValueError("class dimensions disagree")
    ev = _pencil_min_eig(Lm, Wm - Lm)
    if ev(1.0) <= 0.0:
        raise ValueError("initial class must be Kahler (positive definite)")
    # sign-consistent probe at the floor: eigensolver round-off must not turn a
    # strictly positive pencil into a spurious crossing
    eig_noise = 64.0 * np.finfo(float).eps * max(
        1.0, float(np.linalg.norm(Lm)), float(np.linalg.norm(Wm)))
    if ev(S_FLOOR) > -eig_noise:
        return math.inf
    lo, hi = S_FLOOR, 1.0
    while hi - lo > S_BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if ev(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return -math.log(0.5 * (lo + hi))


def mixed_discriminant(*classes):
    """Mixed discriminant of n hermitian n-by-n matrices, D(A,...,A) = det A.

    Computed by inclusion-exclusion polarization; the subset terms are summed
    with math.fsum so the result is exactly symmetric under argument
    permutation.  The repeated-argument case short-circuits to the determinant,
    which the normalization makes exact.
    """
    mats = [_coerce(a) for a in classes]
    n = mats[0].shape[0]
    if len(mats) != n:
        raise ValueError(f"need exactly n={n} arguments, got {len(mats)}")
    if any(m.shape != (n, n) for m in mats):
        raise ValueError("all arguments must have the same dimension")
    if all(np.array_equal(mats[0], m) for m in mats[1:]):
        return float(np.linalg.det(mats[0]).real)
    terms = []
    for r in range(1, n + 1):
        sign = (-1) ** (n - r)
        for subset in combinations(range(n), r):
            # canonical summation order makes the value exactly permutation-symmetric
            chunk = sorted((mats[i] for i in subset), key=lambda m: m.tobytes())
            s = chunk[0]
            for m in chunk[1:]:
                s = s + m
            terms.append(sign * float(np.linalg.det(s).real))
    return math.fsum(terms) / math.factorial(n)


def _intersection_sequence(L, omega0):
    """d_i = D(L^{n-i}, omega0^{i}) for i = 0..n."""
    Lm, Wm = _coerce(L), _coerce(omega0)
    n = Lm.shape[0]
    return [mixed_discriminant(*([Lm] * (n - i) + [Wm] * i)) for i in range(n + 1)]


def collapse_order(L, omega0):
    """Smallest k with the intersection number L^{n-k} . omega0^k nonzero.

    Vanishing is judged against VANISHING_RTOL relative to det(omega0); the
    input matrices are exact user data, so zeros are structural.
    """
    Lc = L if isinstance(L, CohomologyClass) else CohomologyClass(L)
    Wc = omega0 if isinstance(omega0, CohomologyClass) else CohomologyClass(omega0)
    if not Wc.is_kahler():
        raise ValueError("omega0 must be Kahler (positive definite)")
    if not Lc.is_nef():
        raise ValueError("L must be nef (positive semidefinite) for a collapse order")
    d = _intersection_sequence(Lc.matrix, Wc.matrix)
    thresh = VANISHING_RTOL * abs(Wc.volume())
    for k, dk in enumerate(d):
        if dk > thresh:
            return k
    raise RuntimeError("no nonzero intersection number found (omega0 not Kahler?)")


@dataclass(frozen=True)
class VolumePolynomial:
    """Coefficients c_0..c_n of det(L + s M), M = omega0 - L, in s = e^{-t}."""

    coefficients: tuple

    def __call__(self, s):
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * s + c
        return acc

    def at_time(self, t):
        return self(math.exp(-t))

    @property
    def degree_of_first_nonzero(self):
        scale = max(abs(c) for c in self.coefficients)
        for j, c in enumerate(self.coefficients):
            if abs(c) > VANISHING_RTOL * max(1.0, scale):
                return j
        return None


def volume_polynomial(L, omega0):
    """det(L + s M) expanded in s via mixed discriminants."""
    Lm, Wm = _coerce(L), _coerce(omega0)
    n = Lm.shape[0]
    M = Wm - Lm
    coeffs = []
    for j in range(n + 1):
        d = mixed_discriminant(*([Lm] * (n - j) + [M] * j))
        coeffs.append(math.comb(n, j) * d)
    return VolumePolynomial(tuple(coeffs))
