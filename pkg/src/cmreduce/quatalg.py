"""Definite rational quaternion algebras B_{inf,p}: construction with
certified ramification, maximal orders, rank-4 lattice and ideal
arithmetic, ideal class sets with mass certificates, Gross lattices,
optimal embeddings, Killing-form and discriminant computations, and local
norm surjectivity.

Lattices are stored as (denominator, integer HNF basis matrix) against the
1, i, j, k frame, so lattice equality is matrix equality.  All arithmetic
is exact; Fincke-Pohst enumeration uses an exact rational Cholesky
decomposition with integer interval endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import BudgetError, CertificateError, DomainError, NotRepresented
from .numbase import exact_sqrt_fraction, factorize, is_prime, isqrt, kronecker
from .quadforms import Discriminant, QuadForm

__all__ = [
    "QuaternionAlgebra",
    "QuatElement",
    "Lattice4",
    "Order",
    "LeftIdeal",
    "IdealClassSet",
    "GrossLattice",
    "Embedding",
    "hilbert_symbol",
    "construct_Bp",
    "mat2_model",
    "maximal_order",
    "gross_lattice",
    "find_optimal_embedding",
    "left_ideal_from_class",
    "is_same_class",
    "ideal_classes",
    "right_order",
    "unit_weight",
    "killing_check",
    "packet_discriminant",
    "hs_norm_ratio",
    "local_norm_surjectivity",
]


# ---------------------------------------------------------------------------
# Hilbert symbols and algebra construction
# ---------------------------------------------------------------------------


def _eps2(u: int) -> int:
    return ((u - 1) // 2) % 2


def _omega2(u: int) -> int:
    return ((u * u - 1) // 8) % 2


def _split_prime_power(n: int, p: int) -> tuple[int, int]:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e, n


def hilbert_symbol(a: int, b: int, place) -> int:
    """Local Hilbert symbol (a, b)_v for v a prime or the string/float 'inf'."""
    if a == 0 or b == 0:
        raise DomainError("hilbert symbol requires nonzero arguments")
    if place in ("inf", "infty", math.inf):
        return -1 if (a < 0 and b < 0) else 1
    p = place
    if not (isinstance(p, int) and is_prime(p)):
        raise DomainError(f"invalid place {place!r}")
    if p == 2:
        alpha, u = _split_prime_power(a, 2)
        beta, v = _split_prime_power(b, 2)
        exp = _eps2(u) * _eps2(v) + alpha * _omega2(v) + beta * _omega2(u)
        return -1 if exp % 2 else 1
    alpha, u = _split_prime_power(a, p)
    beta, v = _split_prime_power(b, p)
    result = 1
    if alpha % 2 and beta % 2 and (p - 1) // 2 % 2:
        result = -result
    if beta % 2:
        result *= kronecker(u, p)
    if alpha % 2:
        result *= kronecker(v, p)
    return result


@dataclass(frozen=True)
class QuaternionAlgebra:
    """Basis 1, i, j, k with i^2 = a, j^2 = b, k = ij = -ji."""

    a: int
    b: int
    ramified: frozenset = field(default_factory=frozenset)

    @property
    def is_definite(self) -> bool:
        return self.a < 0 and self.b < 0

    def one(self) -> "QuatElement":
        return QuatElement(self, (Fraction(1), Fraction(0), Fraction(0), Fraction(0)))

    def element(self, x0, x1, x2, x3) -> "QuatElement":
        return QuatElement(self, (Fraction(x0), Fraction(x1), Fraction(x2), Fraction(x3)))

    def basis_elements(self) -> list["QuatElement"]:
        e = [self.element(1, 0, 0, 0), self.element(0, 1, 0, 0),
             self.element(0, 0, 1, 0), self.element(0, 0, 0, 1)]
        return e


def ramified_places(a: int, b: int) -> frozenset:
    """Certified ramification set via Hilbert symbols at inf, 2 and all
    primes dividing 2ab."""
    places = {2} | {p for p, _ in factorize(2 * a * b)}
    out = set()
    if hilbert_symbol(a, b, "inf") == -1:
        out.add("inf")
    for q in sorted(places):
        if hilbert_symbol(a, b, q) == -1:
            out.add(q)
    return frozenset(out)


_BP_SEARCH_BOUND = 200


def construct_Bp(p: int) -> QuaternionAlgebra:
    """The quaternion algebra ramified exactly at inf and p, found by a
    deterministic search over negative pairs (a, b) with certified
    ramification."""
    if p in (2, 3) or not is_prime(p):
        raise DomainError(f"construct_Bp requires a prime p >= 5, got {p}")
    for s in range(2, 2 * _BP_SEARCH_BOUND + 1):
        for a in range(-1, -s, -1):
            b = -(s - abs(a))
            if b >= 0:
                continue
            ram = ramified_places(a, b)
            if ram == frozenset({"inf", p}):
                return QuaternionAlgebra(a=a, b=b, ramified=ram)
    raise CertificateError(f"no (a, b) pair with |a|+|b| <= {2 * _BP_SEARCH_BOUND} found for p={p}")


def mat2_model() -> QuaternionAlgebra:
    """The split algebra (1, 1) = Mat_2(Q), used only for cross-checks."""
    return QuaternionAlgebra(a=1, b=1, ramified=frozenset())


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------


class QuatElement:
    """Quaternion with rational coordinates in the 1, i, j, k frame."""

    __slots__ = ("alg", "c")

    def __init__(self, alg: QuaternionAlgebra, coords):
        self.alg = alg
        self.c = tuple(Fraction(x) for x in coords)

    def __repr__(self):
        return f"QuatElement{self.c}"

    def __eq__(self, other):
        return isinstance(other, QuatElement) and self.alg == other.alg and self.c == other.c

    def __hash__(self):
        return hash((self.alg.a, self.alg.b, self.c))

    def __add__(self, other):
        return QuatElement(self.alg, tuple(x + y for x, y in zip(self.c, other.c)))

    def __sub__(self, other):
        return QuatElement(self.alg, tuple(x - y for x, y in zip(self.c, other.c)))

    def __neg__(self):
        return QuatElement(self.alg, tuple(-x for x in self.c))

    def __mul__(self, other):
        if isinstance(other, QuatElement):
            a, b = self.alg.a, self.alg.b
            x0, x1, x2, x3 = self.c
            y0, y1, y2, y3 = other.c
            return QuatElement(
                self.alg,
                (
                    x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
                    x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
                    x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
                    x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
                ),
            )
        return self.scale(other)

    def __rmul__(self, scalar):
        return self.scale(scalar)

    def scale(self, scalar):
        s = Fraction(scalar)
        return QuatElement(self.alg, tuple(s * x for x in self.c))

    def conj(self) -> "QuatElement":
        x0, x1, x2, x3 = self.c
        return QuatElement(self.alg, (x0, -x1, -x2, -x3))

    def trace(self) -> Fraction:
        return 2 * self.c[0]

    def norm(self) -> Fraction:
        a, b = self.alg.a, self.alg.b
        x0, x1, x2, x3 = self.c
        return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3

    def inverse(self) -> "QuatElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of a norm-zero quaternion")
        return self.conj().scale(Fraction(1, 1) / n)

    def is_integral_coords(self) -> bool:
        return all(x.denominator == 1 for x in self.c)


# ---------------------------------------------------------------------------
# Integer HNF and rank-4 lattices
# ---------------------------------------------------------------------------


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hnf_rows(rows: list[list[int]], width: int = 4) -> list[list[int]]:
    """Row-style Hermite normal form: pivots positive on the diagonal of
    successive pivot columns, entries above each pivot reduced into
    [0, pivot)."""
    work = [list(r) for r in rows if any(r)]
    out: list[list[int]] = []
    for col in range(width):
        pivot = None
        rest = []
        for r in work:
            if r[col] == 0:
                rest.append(r)
                continue
            if pivot is None:
                pivot = r
                continue
            g, x, y = _xgcd(pivot[col], r[col])
            pc, rc = pivot[col] // g, r[col] // g
            new_p = [x * u + y * v for u, v in zip(pivot, r)]
            new_r = [-rc * u + pc * v for u, v in zip(pivot, r)]
            pivot = new_p
            if any(new_r):
                rest.append(new_r)
        work = rest
        if pivot is not None:
            if pivot[col] < 0:
                pivot = [-u for u in pivot]
            out.append(pivot)
    # reduce entries above each pivot, increasing pivot column so later
    # reductions cannot spoil earlier ones
    for upper in range(len(out)):
        for idx in range(upper + 1, len(out)):
            pcol = next(c for c in range(width) if out[idx][c] != 0)
            piv = out[idx][pcol]
            q = out[upper][pcol] // piv
            if q:
                out[upper] = [u - q * v for u, v in zip(out[upper], out[idx])]
    return out


@dataclass(frozen=True)
class Lattice4:
    """Full-rank lattice (1/den) * rowspan_Z(mat) in the 1, i, j, k frame."""

    alg: QuaternionAlgebra
    den: int
    mat: tuple[tuple[int, int, int, int], ...]

    @classmethod
    def from_rows(cls, alg: QuaternionAlgebra, rows: list[list[int]], den: int) -> "Lattice4":
        h = hnf_rows(rows)
        if len(h) != 4:
            raise DomainError("lattice generators do not have full rank")
        g = den
        for r in h:
            for x in r:
                g = math.gcd(g, x)
        if g > 1:
            den //= g
            h = [[x // g for x in r] for r in h]
        return cls(alg=alg, den=den, mat=tuple(tuple(r) for r in h))

    @classmethod
    def from_elements(cls, alg: QuaternionAlgebra, elements: list[QuatElement]) -> "Lattice4":
        den = 1
        for e in elements:
            for x in e.c:
                den = den * x.denominator // math.gcd(den, x.denominator)
        rows = [[int(x * den) for x in e.c] for e in elements]
        return cls.from_rows(alg, rows, den)

    def basis(self) -> list[QuatElement]:
        return [
            QuatElement(self.alg, tuple(Fraction(x, self.den) for x in row)) for row in self.mat
        ]

    def covolume_sq_ratio(self) -> Fraction:
        """det(basis matrix)^2 as an exact rational."""
        d = _det4(self.mat)
        return Fraction(d * d, self.den**8)

    def det_fraction(self) -> Fraction:
        return Fraction(abs(_det4(self.mat)), self.den**4)

    def contains(self, x: QuatElement) -> bool:
        coords = self.coordinates(x)
        return coords is not None and all(c.denominator == 1 for c in coords)

    def coordinates(self, x: QuatElement) -> list[Fraction] | None:
        """Coordinates of x in this basis (exact), or None if not in span."""
        target = [Fraction(v) * self.den for v in x.c]
        coords = [Fraction(0)] * 4
        pivots = []
        for i, row in enumerate(self.mat):
            pcol = next(c for c in range(4) if row[c] != 0)
            pivots.append(pcol)
        for i in range(4):
            pcol = pivots[i]
            c = target[pcol] / self.mat[i][pcol]
            coords[i] = c
            for col in range(4):
                target[col] -= c * self.mat[i][col]
        if any(target):
            return None
        return coords

    def scaled(self, s) -> "Lattice4":
        s = Fraction(s)
        rows = [[x * s.numerator for x in r] for r in self.mat]
        return Lattice4.from_rows(self.alg, rows, self.den * s.denominator)

    def conjugate(self) -> "Lattice4":
        rows = [[r[0], -r[1], -r[2], -r[3]] for r in self.mat]
        return Lattice4.from_rows(self.alg, rows, self.den)

    def right_multiply(self, x: QuatElement) -> "Lattice4":
        return Lattice4.from_elements(self.alg, [b * x for b in self.basis()])

    def left_multiply(self, x: QuatElement) -> "Lattice4":
        return Lattice4.from_elements(self.alg, [x * b for b in self.basis()])

    def product(self, other: "Lattice4") -> "Lattice4":
        gens = [b1 * b2 for b1 in self.basis() for b2 in other.basis()]
        return Lattice4.from_elements(self.alg, gens)

    def sum(self, other: "Lattice4") -> "Lattice4":
        return Lattice4.from_elements(self.alg, self.basis() + other.basis())

    def trace_gram(self) -> list[list[int]]:
        """Integer matrix T with T[i][j] = Tr(m_i conj(m_j)) for the scaled
        integer rows m_i; Nr((1/den) c.M) = c^T T c / (2 den^2)."""
        a, b = self.alg.a, self.alg.b
        T = [[0] * 4 for _ in range(4)]
        for i in range(4):
            xi = self.mat[i]
            for j in range(i, 4):
                yj = self.mat[j]
                v = 2 * (xi[0] * yj[0] - a * xi[1] * yj[1] - b * xi[2] * yj[2] + a * b * xi[3] * yj[3])
                T[i][j] = T[j][i] = v
        return T


def _det4(m) -> int:
    # cofactor expansion, exact
    def det3(a):
        return (
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        )

    total = 0
    for col in range(4):
        minor = [[m[r][c] for c in range(4) if c != col] for r in range(1, 4)]
        term = m[0][col] * det3(minor)
        total += term if col % 2 == 0 else -term
    return total


# ---------------------------------------------------------------------------
# Exact Fincke-Pohst enumeration
# ---------------------------------------------------------------------------


def _cholesky(T: list[list[int]], n: int):
    """q[i][i] = d_i and q[i][j] = u_ij with x^T T x = sum d_i (x_i + sum u_ij x_j)^2."""
    q = [[Fraction(T[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        if q[i][i] <= 0:
            raise DomainError("form is not positive definite")
        for j in range(i + 1, n):
            t = q[i][j]
            q[j][i] = t
            q[i][j] = t / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] = q[k][l] - q[k][i] * q[i][l]
    return q


def _sqrt_floor_frac(f: Fraction) -> Fraction:
    """A lower bound s <= sqrt(f) < s + 1/den-ish; only used to seed intervals."""
    if f < 0:
        return Fraction(-1)
    return Fraction(isqrt(f.numerator * f.denominator), f.denominator)


def _int_interval(center: Fraction, radius_sq: Fraction) -> tuple[int, int]:
    """Integers z with (z + center)^2 <= radius_sq, as [lo, hi] (hi < lo if empty)."""
    if radius_sq < 0:
        return 1, 0
    s = _sqrt_floor_frac(radius_sq)
    lo = math.ceil(-center - s - 1)
    hi = math.floor(-center + s + 1)
    while (Fraction(lo) + center) ** 2 > radius_sq:
        lo += 1
        if lo > hi:
            return 1, 0
    while (Fraction(hi) + center) ** 2 > radius_sq:
        hi -= 1
        if hi < lo:
            return 1, 0
    return lo, hi


def enumerate_quadratic_form(T: list[list[int]], bound, n: int = 4):
    """All nonzero integer vectors x with x^T T x <= bound (exact).

    Yields (x, value) pairs; both x and -x are produced.
    """
    bound = Fraction(bound)
    if bound < 0:
        return
    q = _cholesky(T, n)
    x = [0] * n

    def rec(i: int, remaining: Fraction):
        if i < 0:
            if any(x):
                yield tuple(x), bound - remaining
            return
        center = Fraction(0)
        for c in range(i + 1, n):
            center += q[i][c] * x[c]
        lo, hi = _int_interval(center, remaining / q[i][i])
        for z in range(lo, hi + 1):
            x[i] = z
            used = q[i][i] * (Fraction(z) + center) ** 2
            yield from rec(i - 1, remaining - used)
        x[i] = 0

    yield from rec(n - 1, bound)


def _convex_int_interval(a: int, b: int, c: int) -> tuple[int, int]:
    """Integers x with a x^2 + 2 b x + c <= 0 for a > 0; empty iff hi < lo."""
    disc = b * b - a * c
    if disc < 0:
        return 1, 0
    s = isqrt(disc)
    lo = -((b + s) // a) - 2
    hi = (s - b) // a + 2
    while lo <= hi and a * lo * lo + 2 * b * lo + c > 0:
        lo += 1
    while hi >= lo and a * hi * hi + 2 * b * hi + c > 0:
        hi -= 1
    return lo, hi


def ternary_solutions(T: list[list[int]], t: int) -> list[tuple[int, int, int]]:
    """All integer (x0, x1, x2) with x^T T x = t for positive definite T.

    Projects through exact scaled Schur complements and solves the leading
    coordinate as an integer quadratic; integer arithmetic only.
    """
    if t < 0:
        return []
    a00 = T[0][0]
    p11 = a00 * T[1][1] - T[0][1] ** 2
    p12 = a00 * T[1][2] - T[0][1] * T[0][2]
    p22 = a00 * T[2][2] - T[0][2] ** 2
    det2 = p11 * p22 - p12 * p12
    bound = a00 * t
    out = []
    lo2, hi2 = _convex_int_interval(det2, 0, -p11 * bound)
    for x2 in range(lo2, hi2 + 1):
        lo1, hi1 = _convex_int_interval(p11, p12 * x2, p22 * x2 * x2 - bound)
        for x1 in range(lo1, hi1 + 1):
            b0 = T[0][1] * x1 + T[0][2] * x2
            c0 = T[1][1] * x1 * x1 + 2 * T[1][2] * x1 * x2 + T[2][2] * x2 * x2 - t
            disc = b0 * b0 - a00 * c0
            if disc < 0:
                continue
            s = isqrt(disc)
            if s * s != disc:
                continue
            for sg in (s,) if s == 0 else (s, -s):
                num = sg - b0
                if num % a00 == 0:
                    x0 = num // a00
                    if x0 or x1 or x2:
                        out.append((x0, x1, x2))
    return out


def quaternary_hits_value(T: list[list[int]], t: int) -> bool:
    """True iff some integer vector has x^T T x = t (positive definite T);
    early exit on the first hit."""
    if t < 0:
        return False
    a00 = T[0][0]
    P = [
        [a00 * T[i][j] - T[0][i] * T[0][j] for j in (1, 2, 3)]
        for i in (1, 2, 3)
    ]
    p00, p01, p02 = P[0][0], P[0][1], P[0][2]
    p11, p12, p22 = P[1][1], P[1][2], P[2][2]
    r11 = p00 * p11 - p01 * p01
    r12 = p00 * p12 - p01 * p02
    r22 = p00 * p22 - p02 * p02
    det_r = r11 * r22 - r12 * r12
    bound_p = a00 * t
    lo3, hi3 = _convex_int_interval(det_r, 0, -r11 * p00 * bound_p)
    for x3 in range(lo3, hi3 + 1):
        lo2, hi2 = _convex_int_interval(r11, r12 * x3, r22 * x3 * x3 - p00 * bound_p)
        for x2 in range(lo2, hi2 + 1):
            c1 = p11 * x2 * x2 + 2 * p12 * x2 * x3 + p22 * x3 * x3 - bound_p
            lo1, hi1 = _convex_int_interval(p00, p01 * x2 + p02 * x3, c1)
            for x1 in range(lo1, hi1 + 1):
                b0 = T[0][1] * x1 + T[0][2] * x2 + T[0][3] * x3
                c0 = (
                    T[1][1] * x1 * x1
                    + T[2][2] * x2 * x2
                    + T[3][3] * x3 * x3
                    + 2 * (T[1][2] * x1 * x2 + T[1][3] * x1 * x3 + T[2][3] * x2 * x3)
                    - t
                )
                disc = b0 * b0 - a00 * c0
                if disc < 0:
                    continue
                s = isqrt(disc)
                if s * s != disc:
                    continue
                for sg in (s,) if s == 0 else (s, -s):
                    num = sg - b0
                    if num % a00 == 0 and (num // a00 or x1 or x2 or x3):
                        return True
    return False


def lattice_vectors_with_norm(lat: Lattice4, target) -> list[QuatElement]:
    """All v in the lattice with Nr(v) = target (exact), canonical order."""
    target = Fraction(target)
    T = lat.trace_gram()
    scaled = 2 * lat.den**2 * target
    if scaled.denominator != 1:
        return []
    out = []
    for coords, val in enumerate_quadratic_form(T, scaled):
        if val == scaled:
            out.append(coords)
    out.sort()
    return [
        QuatElement(lat.alg, tuple(Fraction(sum(c[i] * lat.mat[i][k] for i in range(4)), lat.den) for k in range(4)))
        for c in out
    ]


def lattice_min_norm_hits(lat: Lattice4, bound) -> bool:
    """True iff some nonzero lattice vector has Nr exactly `bound` -- used
    for the principality test where `bound` = Nr(lattice) is the a priori
    minimum of the norm on the lattice."""
    bound = Fraction(bound)
    T = lat.trace_gram()
    scaled = 2 * lat.den**2 * bound
    if scaled.denominator != 1:
        return False
    return quaternary_hits_value(T, scaled.numerator)


def lattice_shortest_vectors(lat: Lattice4) -> list[QuatElement]:
    """Nonzero vectors of minimal norm, canonical coordinate order."""
    T = lat.trace_gram()
    best = None
    hits: list[tuple] = []
    bound = 2 * lat.den**2 * min(b.norm() for b in lat.basis())
    for coords, val in enumerate_quadratic_form(T, bound):
        if best is None or val < best:
            best = val
            hits = [coords]
        elif val == best:
            hits.append(coords)
    hits.sort()
    return [
        QuatElement(lat.alg, tuple(Fraction(sum(c[i] * lat.mat[i][k] for i in range(4)), lat.den) for k in range(4)))
        for c in hits
    ]


# ---------------------------------------------------------------------------
# Orders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Order:
    lattice: Lattice4

    @property
    def alg(self) -> QuaternionAlgebra:
        return self.lattice.alg

    def basis(self) -> list[QuatElement]:
        return self.lattice.basis()

    def contains(self, x: QuatElement) -> bool:
        return self.lattice.contains(x)

    @property
    def reduced_discriminant(self) -> int:
        det = Fraction(abs(_det4(self.lattice.trace_gram())), self.lattice.den**8)
        rd = exact_sqrt_fraction(det)
        if rd.denominator != 1:
            raise CertificateError("non-integral reduced discriminant")
        return rd.numerator

    def is_multiplicatively_closed(self) -> bool:
        bas = self.basis()
        return all(self.lattice.contains(x * y) for x in bas for y in bas)

    @property
    def unit_weight(self) -> int:
        return unit_weight(self)


def unit_weight(order: Order) -> int:
    """|O^x / {+-1}| = half the number of norm-1 lattice vectors."""
    if not order.alg.is_definite:
        raise DomainError("unit counting needs a definite algebra")
    units = lattice_vectors_with_norm(order.lattice, 1)
    if len(units) % 2:
        raise CertificateError("odd number of norm-1 vectors")
    return len(units) // 2


def maximal_order(B: QuaternionAlgebra) -> Order:
    """Saturate Z<1,i,j,k> at the primes dividing the reduced discriminant
    until it equals p; certified by the trace-pairing Gram determinant."""
    if not B.is_definite:
        raise DomainError("maximal_order expects a definite algebra")
    if B.ramified != frozenset({"inf"}) and len(B.ramified) != 2:
        raise DomainError("algebra must be ramified at exactly {inf, p}")
    p = next(q for q in B.ramified if q != "inf")
    lat = Lattice4.from_elements(B, B.basis_elements())
    order = Order(lattice=lat)
    rd = order.reduced_discriminant
    while rd != p:
        enlarged = False
        for q, _ in factorize(rd):
            bigger = _enlarge_at(order, q)
            if bigger is not None:
                order = bigger
                rd = order.reduced_discriminant
                enlarged = True
                break
        if not enlarged:
            break
    if order.reduced_discriminant != p:
        raise CertificateError(
            f"saturation stalled at reduced discriminant {order.reduced_discriminant}, "
            f"expected {p}; ramification certificate is suspect"
        )
    return order


def _enlarge_at(order: Order, q: int) -> Order | None:
    """One superorder step of index q, if any: scan x in (1/q)O \\ O with
    integral trace and norm whose span with O is multiplicatively closed."""
    bas = order.basis()
    for c in _nonzero_tuples_mod(q):
        x = QuatElement(order.alg, (0, 0, 0, 0))
        for coef, b in zip(c, bas):
            if coef:
                x = x + b.scale(Fraction(coef, q))
        if x.trace().denominator != 1 or x.norm().denominator != 1:
            continue
        candidate = Lattice4.from_elements(order.alg, bas + [x])
        if candidate == order.lattice:
            continue
        cand_order = Order(lattice=candidate)
        if cand_order.is_multiplicatively_closed():
            return cand_order
    return None


def _nonzero_tuples_mod(q: int):
    for c0 in range(q):
        for c1 in range(q):
            for c2 in range(q):
                for c3 in range(q):
                    if c0 or c1 or c2 or c3:
                        yield (c0, c1, c2, c3)


# ---------------------------------------------------------------------------
# Gross lattice and optimal embeddings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrossLattice:
    """Rank-3 lattice {2x - Tr(x): x in O} inside the traceless subspace,
    stored as (den, 3 rows in (i, j, k) coordinates)."""

    alg: QuaternionAlgebra
    den: int
    mat: tuple[tuple[int, int, int], ...]

    def basis(self) -> list[QuatElement]:
        return [
            QuatElement(self.alg, (Fraction(0),) + tuple(Fraction(x, self.den) for x in row))
            for row in self.mat
        ]

    def gram(self) -> list[list[int]]:
        a, b = self.alg.a, self.alg.b
        T = [[0] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(i, 3):
                xi, yj = self.mat[i], self.mat[j]
                v = 2 * (-a * xi[0] * yj[0] - b * xi[1] * yj[1] + a * b * xi[2] * yj[2])
                T[i][j] = T[j][i] = v
        return T

    def coordinates(self, v: QuatElement) -> list[Fraction] | None:
        if v.c[0] != 0:
            return None
        target = [Fraction(x) * self.den for x in v.c[1:]]
        coords = [Fraction(0)] * 3
        for i in range(3):
            pcol = next(c for c in range(3) if self.mat[i][c] != 0)
            cc = target[pcol] / self.mat[i][pcol]
            coords[i] = cc
            for col in range(3):
                target[col] -= cc * self.mat[i][col]
        if any(target):
            return None
        return coords

    def contains_primitive(self, v: QuatElement) -> bool:
        coords = self.coordinates(v)
        if coords is None or any(c.denominator != 1 for c in coords):
            return False
        g = 0
        for c in coords:
            g = math.gcd(g, c.numerator)
        return g == 1


def gross_lattice(order: Order) -> GrossLattice:
    """Basis of {2x - Tr(x) : x in O} with its positive definite norm Gram."""
    den = order.lattice.den
    rows = []
    for row in order.lattice.mat:
        rows.append([2 * row[1], 2 * row[2], 2 * row[3]])
    h = hnf_rows([[0] + r for r in rows])  # embed in 4 cols with leading zero
    # drop the leading zero column; rank must be 3
    mat = [r[1:] for r in h]
    if len(mat) != 3:
        raise CertificateError("Gross lattice is not of rank 3")
    g = den
    for r in mat:
        for x in r:
            g = math.gcd(g, x)
    if g > 1:
        den //= g
        mat = [[x // g for x in r] for r in mat]
    return GrossLattice(alg=order.alg, den=den, mat=tuple(tuple(r) for r in mat))


def reconstruct_order_from_gross(gl: GrossLattice) -> Lattice4:
    """(1/2){x in Z + O^T : Nr(x) in 4Z} as a lattice; equals O for orders.

    The set is 4L-periodic for L = Z + O^T, so it is assembled from the
    residues of L/4L with norm divisible by 4.
    """
    alg = gl.alg
    gens4 = [QuatElement(alg, (1, 0, 0, 0))] + gl.basis()
    L = Lattice4.from_elements(alg, gens4)
    Lbasis = L.basis()
    reps = []
    for c in _tuples_mod(4):
        x = QuatElement(alg, (0, 0, 0, 0))
        for coef, b in zip(c, Lbasis):
            if coef:
                x = x + b.scale(coef)
        n = x.norm()
        if n.denominator == 1 and n.numerator % 4 == 0:
            reps.append(x)
    gens = [b.scale(4) for b in Lbasis] + reps
    span = Lattice4.from_elements(alg, gens)
    return span.scaled(Fraction(1, 2))


def _tuples_mod(q: int):
    for c0 in range(q):
        for c1 in range(q):
            for c2 in range(q):
                for c3 in range(q):
                    yield (c0, c1, c2, c3)


@dataclass(frozen=True)
class Embedding:
    """Optimal embedding of the quadratic order of discriminant D recorded
    as the Gross-lattice vector v = iota(sqrt(D))."""

    disc: Discriminant
    v: QuatElement
    order: Order

    def iota(self, m, n) -> QuatElement:
        """Image of m + n * (D + sqrt(D)) / 2."""
        D = self.disc.D
        one = self.order.alg.element(1, 0, 0, 0)
        return one.scale(Fraction(m) + Fraction(n) * Fraction(D, 2)) + self.v.scale(Fraction(n, 2))

    def iota_of_quadratic(self, rational_part: Fraction, sqrtD_coeff: Fraction) -> QuatElement:
        one = self.order.alg.element(1, 0, 0, 0)
        return one.scale(rational_part) + self.v.scale(sqrtD_coeff)


def find_optimal_embedding(order: Order, D) -> Embedding:
    """First primitive Gross-lattice vector of norm |D| under canonical
    coordinate ordering; NotRepresented if none exists."""
    disc = D if isinstance(D, Discriminant) else Discriminant.of(int(D))
    gl = gross_lattice(order)
    T = gl.gram()
    target = -disc.D
    scaled = 2 * gl.den**2 * target
    hits = []
    for coords in ternary_solutions(T, scaled):
        g = 0
        for c in coords:
            g = math.gcd(g, c)
        if g == 1:
            hits.append(coords)
    if not hits:
        raise NotRepresented(f"|D| = {-disc.D} is not a primitive norm on the Gross lattice")
    hits.sort()
    # sign normalization: first nonzero coordinate positive
    canon = []
    for c in hits:
        first = next(x for x in c if x)
        canon.append(c if first > 0 else tuple(-x for x in c))
    canon = sorted(set(canon))
    c = canon[0]
    v = QuatElement(
        gl.alg,
        (Fraction(0),) + tuple(Fraction(sum(c[i] * gl.mat[i][k] for i in range(3)), gl.den) for k in range(3)),
    )
    emb = Embedding(disc=disc, v=v, order=order)
    # contract: iota lands in the order
    w = emb.iota(0, 1)
    if not order.contains(w):
        raise CertificateError("(D + v)/2 fails to land in the order")
    return emb


def embedding_preimage_lattice(order: Order, v: QuatElement) -> list[list[Fraction]]:
    """Basis (rows, coordinates in (1, v)) of {m + n v : m, n in Q} cap O."""
    # condition: x = m + n v in O, i.e. dual of the projection conditions
    one = order.alg.element(1, 0, 0, 0)
    lat = order.lattice
    cols = []
    # x in O iff coords(x) . inv(M/d) integral; linear in (m, n)
    b_one = lat.coordinates(one)
    b_v = lat.coordinates(v)
    if b_one is None or b_v is None:
        raise DomainError("1 and v must lie in the rational span of O")
    # (m, n) such that m * b_one + n * b_v is integral: dual lattice of
    # the span of the 4 condition columns (b_one[i], b_v[i])
    conditions = [(b_one[i], b_v[i]) for i in range(4)]
    den = 1
    for u, w in conditions:
        den = den * u.denominator // math.gcd(den, u.denominator)
        den = den * w.denominator // math.gcd(den, w.denominator)
    rows = [[int(u * den), int(w * den)] for u, w in conditions]
    h = hnf_rows([r + [0, 0] for r in rows])
    g = [r[:2] for r in h]
    if len(g) != 2:
        raise CertificateError("expected rank-2 condition lattice")
    # dual: basis rows of (G^{-1})^T scaled back by den
    a, b = g[0]
    c, d = g[1]
    det = Fraction(a * d - b * c)
    inv_t = [[Fraction(d) / det, Fraction(-c) / det], [Fraction(-b) / det, Fraction(a) / det]]
    return [[x * den for x in row] for row in inv_t]


# ---------------------------------------------------------------------------
# Left ideals and ideal classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LeftIdeal:
    lattice: Lattice4
    left_order: Order

    @property
    def reduced_norm(self) -> Fraction:
        ratio = self.lattice.det_fraction() / self.left_order.lattice.det_fraction()
        return exact_sqrt_fraction(ratio)

    def conjugate_lattice(self) -> Lattice4:
        return self.lattice.conjugate()


def order_as_ideal(order: Order) -> LeftIdeal:
    return LeftIdeal(lattice=order.lattice, left_order=order)


def left_ideal_from_class(order: Order, emb: Embedding, f: QuadForm) -> LeftIdeal:
    """I = O a + O iota((-b + sqrt(D))/2) with reduced norm a."""
    D = emb.disc.D
    if f.discriminant != D:
        raise DomainError("form discriminant does not match the embedding")
    p = next(q for q in order.alg.ramified if q != "inf")
    g = f
    if math.gcd(g.a, p) != 1:
        g = _equivalent_form_coprime_to(f, p)
        if g is None:
            raise CertificateError(f"no equivalent form with leading value coprime to {p}")
    w = emb.iota_of_quadratic(Fraction(-g.b, 2), Fraction(1, 2))
    bas = order.basis()
    gens = [e.scale(g.a) for e in bas] + [e * w for e in bas]
    lat = Lattice4.from_elements(order.alg, gens)
    ideal = LeftIdeal(lattice=lat, left_order=order)
    if ideal.reduced_norm != g.a:
        raise CertificateError(f"ideal norm {ideal.reduced_norm} != form value {g.a}")
    return ideal


def _equivalent_form_coprime_to(f: QuadForm, p: int) -> QuadForm | None:
    """Equivalent form whose leading coefficient is coprime to p, via a
    primitively represented value and a unimodular completion."""
    for s in range(1, 30):
        for x in range(-s, s + 1):
            for y in (-s, s) if abs(x) != s else range(-s, s + 1):
                if math.gcd(x, y) != 1:
                    continue
                a2 = f.value(x, y)
                if a2 > 0 and math.gcd(a2, p) == 1:
                    g, u, wv = _xgcd(x, y)
                    # complete (x, y) to a determinant-1 matrix [[x, -wv], [y, u]]
                    b2 = 2 * (f.a * x * (-wv) + f.c * y * u) + f.b * (x * u - wv * y)
                    c2 = f.value(-wv, u)
                    return QuadForm(a2, b2, c2)
    return None


def is_same_class(I: LeftIdeal, J: LeftIdeal) -> bool:
    """True iff J = I x for some invertible x; decided by whether conj(I)*J
    contains a vector of norm Nr(I)*Nr(J) (its a priori minimum)."""
    if I.left_order.lattice != J.left_order.lattice:
        raise DomainError("class comparison requires identical left orders")
    if I.lattice == J.lattice:
        return True
    M = I.conjugate_lattice().product(J.lattice)
    return lattice_min_norm_hits(M, I.reduced_norm * J.reduced_norm)


@dataclass(frozen=True)
class IdealClassSet:
    order: Order
    representatives: tuple[LeftIdeal, ...]
    right_orders: tuple[Order, ...]
    weights: tuple[int, ...]

    @property
    def h(self) -> int:
        return len(self.representatives)

    @property
    def mass(self) -> Fraction:
        return sum((Fraction(1, w) for w in self.weights), Fraction(0))

    def index_of(self, I: LeftIdeal) -> int:
        for idx, rep in enumerate(self.representatives):
            if is_same_class(I, rep):
                return idx
        raise CertificateError("ideal matches no enumerated class")


def right_order(I: LeftIdeal) -> Order:
    """{x : I x subseteq I} by exact rational linear algebra (dual lattice of
    the stacked membership conditions)."""
    lat = I.lattice
    alg = lat.alg
    basis = lat.basis()
    cols: list[list[Fraction]] = []
    for b in basis:
        # condition: coords(b * x) integral in I's basis; columns of the
        # 4x4 rational matrix A with (b x) -> coords are linear functionals
        images = []
        for e in alg.basis_elements():
            img = lat.coordinates(b * e)
            if img is None:
                raise CertificateError("product left the rational span")
            images.append(img)
        # A[r][c]: coefficient of x_c in the r-th coordinate
        for r in range(4):
            cols.append([images[c][r] for c in range(4)])
    den = 1
    for col in cols:
        for x in col:
            den = den * x.denominator // math.gcd(den, x.denominator)
    int_rows = [[int(x * den) for x in col] for col in cols]
    h = hnf_rows(int_rows)
    if len(h) != 4:
        raise CertificateError("membership conditions not of full rank")
    # solution lattice = den * dual of rowspan(h)
    inv_t = _inverse_transpose_rows(h)
    rows = [[x * den for x in row] for row in inv_t]
    lat_rows = []
    lcm = 1
    for row in rows:
        for x in row:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    lat_rows = [[int(x * lcm) for x in row] for row in rows]
    return Order(lattice=Lattice4.from_rows(alg, lat_rows, lcm))


def _inverse_transpose_rows(m: list[list[int]]) -> list[list[Fraction]]:
    """Rows of (M^{-1})^T for an integer 4x4 matrix M given by rows."""
    det = _det4(m)
    if det == 0:
        raise DomainError("singular matrix")
    # cofactor matrix: inv = adj / det, adj = cofactor^T, so (inv)^T = cofactor / det
    cof = [[Fraction(0)] * 4 for _ in range(4)]
    for r in range(4):
        for c in range(4):
            minor = [[m[i][j] for j in range(4) if j != c] for i in range(4) if i != r]
            sign = -1 if (r + c) % 2 else 1

            def det3(a):
                return (
                    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                    - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                    + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
                )

            cof[r][c] = Fraction(sign * det3(minor), det)
    return cof


def _neighbor_ideals(I: LeftIdeal, ell: int) -> list[LeftIdeal]:
    """The ell + 1 left subideals J with ell I < J < I of index ell^2,
    found as O-stable dimension-2 subspaces of I / ell I."""
    lat = I.lattice
    alg = lat.alg
    order = I.left_order
    # matrices of left multiplication by O's basis on I / ell I
    mats = []
    basis = lat.basis()
    for g in order.basis():
        rows = []
        for b in basis:
            coords = lat.coordinates(g * b)
            if coords is None or any(c.denominator != 1 for c in coords):
                raise CertificateError("order does not stabilize the ideal")
            rows.append([int(c) % ell for c in coords])
        mats.append(rows)
    subspaces = _stable_subspaces_dim2(mats, ell)
    if len(subspaces) != ell + 1:
        raise CertificateError(f"{len(subspaces)} stable subspaces, expected {ell + 1}")
    out = []
    for v1, v2 in subspaces:
        gens = [b.scale(ell) for b in basis]
        for v in (v1, v2):
            x = QuatElement(alg, (0, 0, 0, 0))
            for coef, b in zip(v, basis):
                if coef:
                    x = x + b.scale(coef)
            gens.append(x)
        out.append(LeftIdeal(lattice=Lattice4.from_elements(alg, gens), left_order=order))
    return out


def _stable_subspaces_dim2(mats, ell: int):
    """Dimension-2 subspaces of F_ell^4 stable under all matrices (row
    convention: vector v maps to [sum_k v_k m[k][j]]_j)."""
    vecs = [v for v in _tuples_mod(ell) if any(v)]
    seen = set()
    out = []
    for i, v1 in enumerate(vecs):
        for v2 in vecs[i + 1 :]:
            basis = _rref2(v1, v2, ell)
            if basis is None or basis in seen:
                continue
            seen.add(basis)
            if all(_in_span2(_apply(m, v, ell), basis, ell) for m in mats for v in basis):
                out.append(basis)
    return out


def _apply(m, v, ell):
    return tuple(sum(v[k] * m[k][j] for k in range(4)) % ell for j in range(4))


def _rref2(v1, v2, ell):
    rows = [list(v1), list(v2)]
    pivots = []
    r = 0
    for c in range(4):
        pr = None
        for i in range(r, 2):
            if rows[i][c] % ell:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = pow(rows[r][c], -1, ell)
        rows[r] = [(x * inv) % ell for x in rows[r]]
        for i in range(2):
            if i != r and rows[i][c] % ell:
                f = rows[i][c]
                rows[i] = [(x - f * y) % ell for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == 2:
            break
    if r != 2:
        return None
    return (tuple(rows[0]), tuple(rows[1]))


def _in_span2(v, basis, ell):
    b1, b2 = basis
    # reduce v against the RREF basis
    v = list(v)
    for b in (b1, b2):
        pc = next((c for c in range(4) if b[c]), None)
        if pc is not None and v[pc]:
            f = v[pc]
            v = [(x - f * y) % ell for x, y in zip(v, b)]
    return not any(v)


def _reduce_ideal(I: LeftIdeal) -> LeftIdeal:
    """Equivalent ideal of small norm: multiply by the inverse of a
    canonical shortest vector."""
    shorts = lattice_shortest_vectors(I.lattice)
    x = shorts[0]
    lat = I.lattice.right_multiply(x.inverse())
    return LeftIdeal(lattice=lat, left_order=I.left_order)


def ideal_classes(order: Order) -> IdealClassSet:
    """BFS over 2-neighbors with the mass formula as completeness
    certificate: stop exactly when sum 1/w = (p - 1)/12."""
    p = next(q for q in order.alg.ramified if q != "inf")
    ell = 2 if p != 2 else 3
    target = Fraction(p - 1, 12)
    start = order_as_ideal(order)
    reps = [start]
    orders = [order]
    weights = [unit_weight(order)]
    mass = Fraction(1, weights[0])
    queue = [start]
    while mass < target and queue:
        current = queue.pop(0)
        for J in _neighbor_ideals(current, ell):
            J = _reduce_ideal(J)
            if any(is_same_class(J, R) for R in reps):
                continue
            Or = right_order(J)
            w = unit_weight(Or)
            reps.append(J)
            orders.append(Or)
            weights.append(w)
            mass += Fraction(1, w)
            queue.append(J)
            if mass == target:
                break
            if mass > target:
                raise CertificateError(f"mass overshoot at p={p}: {mass} > {target}")
    if mass != target:
        raise CertificateError(f"class-set enumeration incomplete at p={p}: {mass} != {target}")
    return IdealClassSet(
        order=order,
        representatives=tuple(reps),
        right_orders=tuple(orders),
        weights=tuple(weights),
    )


@lru_cache(maxsize=None)
def quaternion_data(p: int) -> tuple[QuaternionAlgebra, Order, IdealClassSet]:
    """Cached (algebra, maximal order, class set) for B_{inf,p}."""
    B = construct_Bp(p)
    O = maximal_order(B)
    cls = ideal_classes(O)
    return B, O, cls


# ---------------------------------------------------------------------------
# Killing form, packet discriminants, Hilbert-Schmidt ratio
# ---------------------------------------------------------------------------


def _ad_matrix(x: QuatElement) -> list[list[Fraction]]:
    """Matrix of v -> xv - vx on the traceless subspace in basis (i, j, k)."""
    alg = x.alg
    cols = []
    for e in alg.basis_elements()[1:]:
        img = x * e - e * x
        assert img.c[0] == 0
        cols.append(img.c[1:])
    # cols[j] = image of basis vector j; matrix M[i][j] = cols[j][i]
    return [[cols[j][i] for j in range(3)] for i in range(3)]


def killing_check(B: QuaternionAlgebra, x: QuatElement) -> tuple[Fraction, Fraction]:
    """(trace(ad_x^2), -8 Nr(x)) for traceless x; equal identically.

    ad_x has spectrum {0, +2 sqrt(x^2), -2 sqrt(x^2)} on the traceless
    subspace and x^2 = -Nr(x), so trace(ad_x^2) = 8 x^2 = -8 Nr(x).
    """
    if x.trace() != 0:
        raise DomainError("killing_check requires a traceless element")
    M = _ad_matrix(x)
    tr = sum(M[i][j] * M[j][i] for i in range(3) for j in range(3))
    return tr, -8 * x.norm()


def packet_discriminant(emb: Embedding) -> int:
    """Finite part prod_q |D|_q^{-1} = |D| of the packet discriminant, with
    the archimedean factor normalized to 1; requires v primitive in the
    host Gross lattice."""
    gl = gross_lattice(emb.order)
    if not gl.contains_primitive(emb.v):
        raise DomainError("embedding vector is not primitive in the Gross lattice")
    D = emb.disc.D
    out = 1
    for q, e in factorize(-D):
        out *= q**e  # |D|_q^{-1} = q^{v_q(D)}
    return out


def hs_norm_ratio(D) -> float:
    """Hilbert-Schmidt norm of ad_{iota(sqrt(D))} on traceless Mat_2(R),
    divided by sqrt(|D|); the spectrum {0, +-2 sqrt(D)} gives sqrt(8).

    Computed from the exact characteristic polynomial of the ad matrix in
    the split model (eigenvalues are similarity invariants, so the ratio
    does not depend on the choice of conjugate embedding).
    """
    disc = D if isinstance(D, Discriminant) else Discriminant.of(int(D))
    d = disc.D
    M = _mat2_ad_matrix(d)
    return _hs_from_ad(M, d)


def _mat2_ad_matrix(d: int, g: tuple[tuple[int, int], tuple[int, int]] | None = None):
    """ad of w = [[0, 1], [d, 0]] (or of g w g^{-1}) on traceless 2x2
    matrices in the basis H, E, F."""
    w = ((Fraction(0), Fraction(1)), (Fraction(d), Fraction(0)))
    if g is not None:
        det = Fraction(g[0][0] * g[1][1] - g[0][1] * g[1][0])
        ginv = (
            (g[1][1] / det, -Fraction(g[0][1]) / det),
            (-Fraction(g[1][0]) / det, Fraction(g[0][0]) / det),
        )
        w = _mm(_mm(tuple(tuple(map(Fraction, r)) for r in g), w), ginv)
    H = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(-1)))
    E = ((Fraction(0), Fraction(1)), (Fraction(0), Fraction(0)))
    F = ((Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)))
    cols = []
    for X in (H, E, F):
        img = _msub(_mm(w, X), _mm(X, w))
        # traceless [[alpha, beta], [gamma, -alpha]] -> (alpha, beta, gamma)
        cols.append((img[0][0], img[0][1], img[1][0]))
    return [[cols[j][i] for j in range(3)] for i in range(3)]


def _mm(A, B):
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(2)) for j in range(2)) for i in range(2)
    )


def _msub(A, B):
    return tuple(tuple(A[i][j] - B[i][j] for j in range(2)) for i in range(2))


def _hs_from_ad(M, d: int) -> float:
    # characteristic polynomial l^3 + c2 l^2 + c1 l + c0, exact
    tr = M[0][0] + M[1][1] + M[2][2]
    c2 = -tr
    c1 = (
        M[0][0] * M[1][1] - M[0][1] * M[1][0]
        + M[0][0] * M[2][2] - M[0][2] * M[2][0]
        + M[1][1] * M[2][2] - M[1][2] * M[2][1]
    )
    det = (
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    )
    c0 = -det
    if c2 != 0 or c0 != 0:
        raise CertificateError("ad matrix is not of the expected semisimple shape")
    # spectrum {0, mu, -mu} with mu^2 = -c1; sum |lambda|^2 = 2 |c1|
    hs_sq = 2 * abs(c1)
    return math.sqrt(hs_sq / abs(d))


# ---------------------------------------------------------------------------
# Local norm surjectivity
# ---------------------------------------------------------------------------

_LOCAL_BUDGET = 10**5
_EXHAUSTIVE_RING_CAP = 2 * 10**6


def local_norm_surjectivity(order: Order, q: int, k: int) -> bool:
    """True iff reduced norms of units of O/q^k O cover (Z/q^k)^x.

    For rings small enough the unit norms are enumerated exhaustively.
    Beyond that the answer at level q^k equals the answer at level q (odd
    q) or 2^3 (q = 2): a unit-norm witness Hensel-lifts its norm across
    the whole fiber, since B(x, x) = 2 Nr(x) is a q-unit for odd q and
    h = x gives a valid Newton step modulo 8 and beyond.  Both paths agree
    wherever both are feasible.
    """
    if not is_prime(q) or k < 1:
        raise DomainError("local_norm_surjectivity expects a prime q and k >= 1")
    if q**k > _LOCAL_BUDGET:
        raise BudgetError(f"q^k = {q**k} exceeds the budget {_LOCAL_BUDGET}")
    lift_level = 3 if q == 2 else 1
    level = k
    if q ** (4 * k) > _EXHAUSTIVE_RING_CAP:
        level = max(lift_level, 1)
        while q ** (4 * (level + 1)) <= _EXHAUSTIVE_RING_CAP and level < k:
            level += 1
    return _norms_cover(order, q, level)


def _norms_cover(order: Order, q: int, level: int) -> bool:
    mod = q**level
    bas = order.basis()
    # integer quadratic form data for Nr on the basis
    diag = [int(b.norm()) for b in bas]
    cross = {}
    for i in range(4):
        for j in range(i + 1, 4):
            v = (bas[i] * bas[j].conj()).trace()
            assert v.denominator == 1
            cross[(i, j)] = int(v)
    needed = {u for u in range(mod) if math.gcd(u, q) == 1}
    seen = set()
    rng = range(mod)
    for x0 in rng:
        for x1 in rng:
            for x2 in rng:
                base01 = (
                    diag[0] * x0 * x0 + diag[1] * x1 * x1 + diag[2] * x2 * x2
                    + cross[(0, 1)] * x0 * x1 + cross[(0, 2)] * x0 * x2 + cross[(1, 2)] * x1 * x2
                )
                lin = cross[(0, 3)] * x0 + cross[(1, 3)] * x1 + cross[(2, 3)] * x2
                for x3 in rng:
                    n = (base01 + lin * x3 + diag[3] * x3 * x3) % mod
                    if n in needed and n not in seen:
                        seen.add(n)
                        if len(seen) == len(needed):
                            return True
    return seen == needed
