"""Reduction maps and equidistribution experiments: archimedean reduction
to CM points, reduction at inert primes through left-ideal classes,
simultaneous reduction tuples with empirical-vs-product-measure
statistics, genus-character torus averages, exceptional fields, and
cross-validation against class-polynomial root multiplicities.

Class labels at a prime p are fixed by one globally chosen embedding into
the right order of the first ideal class that hosts the discriminant; all
statistics reported here are invariant under that labeling convention.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import __version__
from .classpoly import classpoly_mod, hilbert_class_poly
from .errors import BudgetError, CertificateError, ConfigError, DomainError, NotRepresented
from .ffield import FfPoly, fp2_construct, roots_with_multiplicity
from .numbase import is_prime, kronecker, squarefree_part
from .quadforms import (
    CMPoint,
    Discriminant,
    QuadForm,
    admissible_discriminants,
    cm_point,
    is_fundamental,
    reduced_forms,
    splitting,
)
from .quatalg import (
    LeftIdeal,
    Lattice4,
    find_optimal_embedding,
    quaternion_data,
)

__all__ = [
    "ReductionRecord",
    "JointDistribution",
    "CharacterSpec",
    "ArchimedeanStats",
    "ScanConfig",
    "ScanReport",
    "NU_INFTY_Y2",
    "nu_infty_y_mass",
    "reduce_archimedean",
    "reduce_at_prime",
    "joint_reduce",
    "fiber_multiset_crosscheck",
    "character_average",
    "exceptional_fields",
    "scan",
]

# nu_infty({Im tau >= Y}) = integral of (3/pi) dx dy / y^2 = 3/(pi Y) for Y >= 1
NU_INFTY_Y2 = 3 / (2 * math.pi)


def nu_infty_y_mass(Y: float) -> float:
    if Y < 1:
        raise DomainError("closed form only valid for Y >= 1 (full-width strip)")
    return 3 / (math.pi * Y)


# ---------------------------------------------------------------------------
# Archimedean reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArchimedeanStats:
    h: int
    min_im: float
    max_im: float
    mass_y_at_least: Fraction
    y_cut: float
    mass_x_at_most: Fraction
    x_cut: float


def reduce_archimedean(D, y_cut: float = 2.0, x_cut: float = 0.25):
    """CM points of all reduced forms plus box-mass statistics."""
    d = int(D) if not isinstance(D, Discriminant) else D.D
    forms = reduced_forms(d)
    points = [cm_point(f, d) for f in forms]
    h = len(points)
    n_y = sum(1 for pt in points if pt.im >= y_cut)
    n_x = sum(1 for pt in points if abs(pt.re) <= x_cut)
    stats = ArchimedeanStats(
        h=h,
        min_im=min(pt.im for pt in points),
        max_im=max(pt.im for pt in points),
        mass_y_at_least=Fraction(n_y, h),
        y_cut=y_cut,
        mass_x_at_most=Fraction(n_x, h),
        x_cut=x_cut,
    )
    return points, stats


# ---------------------------------------------------------------------------
# Reduction at an inert prime
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionRecord:
    D: Discriminant
    form: QuadForm
    point: CMPoint
    class_indices: tuple[int, ...]


def _check_reducible(d: int, p: int) -> Discriminant:
    disc = Discriminant.of(d)
    if splitting(d, p) != "inert":
        raise DomainError(f"p = {p} is not inert in Q(sqrt({d}))")
    if disc.conductor % p == 0:
        raise DomainError(f"conductor of {d} is divisible by p = {p}")
    return disc


@lru_cache(maxsize=4096)
def _prime_reduction(d: int, p: int) -> tuple[tuple[tuple[int, int, int], int], ...]:
    """Map (as tuple pairs) from reduced forms of D to ideal class indices.

    The base point is the first ideal class whose right order admits an
    optimal embedding of the order of discriminant D; the class of a form
    [a] is that of I_base * iota(a).
    """
    disc = _check_reducible(d, p)
    _, order, cls = quaternion_data(p)
    base_idx = None
    emb = None
    for t, Or in enumerate(cls.right_orders):
        try:
            emb = find_optimal_embedding(Or, disc)
            base_idx = t
            break
        except NotRepresented:
            continue
    if emb is None:
        raise CertificateError(f"no ideal class hosts an embedding of D={d} at p={p}")
    base = cls.representatives[base_idx]
    out = []
    for f in reduced_forms(d):
        ideal = _ideal_times_quadratic(base, emb, f, p)
        out.append((f.as_tuple(), cls.index_of(ideal)))
    return tuple(out)


def _ideal_times_quadratic(base: LeftIdeal, emb, f: QuadForm, p: int) -> LeftIdeal:
    """Left ideal base * iota(a_f) where a_f = Z a + Z (-b + sqrt(D))/2."""
    from .quatalg import _equivalent_form_coprime_to

    g = f
    if math.gcd(g.a, p) != 1:
        g = _equivalent_form_coprime_to(f, p)
        if g is None:
            raise CertificateError(f"no equivalent form with value coprime to {p}")
    w = emb.iota_of_quadratic(Fraction(-g.b, 2), Fraction(1, 2))
    bas = base.lattice.basis()
    gens = [e.scale(g.a) for e in bas] + [e * w for e in bas]
    lat = Lattice4.from_elements(base.lattice.alg, gens)
    ideal = LeftIdeal(lattice=lat, left_order=base.left_order)
    if ideal.reduced_norm != base.reduced_norm * g.a:
        raise CertificateError("ideal norm does not match Nr(base) * a")
    return ideal


def reduce_at_prime(D, p: int) -> dict[QuadForm, int]:
    """Class index at p for every reduced form of D (p inert, conductor
    coprime to p)."""
    d = int(D) if not isinstance(D, Discriminant) else D.D
    return {QuadForm(*ft): idx for ft, idx in _prime_reduction(d, p)}


# ---------------------------------------------------------------------------
# Joint reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JointDistribution:
    D: Discriminant
    primes: tuple[int, ...]
    h: int
    tuple_counts: dict
    product_measure: dict
    tv: Fraction
    chi2: float

    @property
    def surjective(self) -> bool:
        return len(self.tuple_counts) == len(self.product_measure)

    def records(self) -> list[ReductionRecord]:
        maps = [reduce_at_prime(self.D.D, p) for p in self.primes]
        out = []
        for f in reduced_forms(self.D.D):
            out.append(
                ReductionRecord(
                    D=self.D,
                    form=f,
                    point=cm_point(f, self.D.D),
                    class_indices=tuple(m[f] for m in maps),
                )
            )
        return out


def _nu_weights(p: int) -> list[Fraction]:
    _, _, cls = quaternion_data(p)
    scale = Fraction(12, p - 1)
    return [scale / w for w in cls.weights]


def joint_reduce(D, primes) -> JointDistribution:
    """Tuple of class indices per Picard class (the same class across all
    primes), with empirical counts, the product measure, total variation
    distance and chi-square."""
    d = int(D) if not isinstance(D, Discriminant) else D.D
    primes = tuple(primes)
    if len(set(primes)) != len(primes):
        raise DomainError("primes must be pairwise distinct")
    disc = Discriminant.of(d)
    forms = reduced_forms(d)
    h = len(forms)
    maps = [reduce_at_prime(d, p) for p in primes]
    counts: Counter = Counter()
    for f in forms:
        counts[tuple(m[f] for m in maps)] += 1
    nus = [_nu_weights(p) for p in primes]
    product: dict[tuple, Fraction] = {}

    def build(prefix, weight):
        i = len(prefix)
        if i == len(primes):
            product[tuple(prefix)] = weight
            return
        for idx, w in enumerate(nus[i]):
            build(prefix + [idx], weight * w)

    build([], Fraction(1))
    tv = Fraction(0)
    chi2 = 0.0
    for t, prob in product.items():
        emp = Fraction(counts.get(t, 0), h)
        tv += abs(emp - prob)
        chi2 += float((emp - prob) ** 2 / prob)
    tv = tv / 2
    assert sum(counts.values()) == h
    assert sum(product.values()) == 1
    return JointDistribution(
        D=disc,
        primes=primes,
        h=h,
        tuple_counts=dict(counts),
        product_measure=product,
        tv=tv,
        chi2=chi2,
    )


# ---------------------------------------------------------------------------
# Cross-validation against H_D root multiplicities
# ---------------------------------------------------------------------------


def fiber_multiset_crosscheck(D, p: int, cache_dir: str | None = None,
                              _perturb_for_tests: bool = False) -> bool:
    """True iff the fiber-size multiset of reduce_at_prime equals the root
    multiplicity multiset of H_D over F_{p^2} (label-free validation)."""
    d = int(D) if not isinstance(D, Discriminant) else D.D
    _check_reducible(d, p)
    fibers = Counter(reduce_at_prime(d, p).values())
    fiber_multiset = sorted(fibers.values())
    if _perturb_for_tests and fiber_multiset:
        fiber_multiset[-1] += 1
    H = hilbert_class_poly(d, cache_dir=cache_dir)
    ctx = fp2_construct(p)
    poly = FfPoly([ctx.el(c) for c in classpoly_mod(H, p)], ctx)
    roots = roots_with_multiplicity(poly, ctx)
    if sum(roots.values()) != H.degree:
        raise CertificateError(f"H_{d} mod {p} does not split over F_(p^2)")
    root_multiset = sorted(roots.values())
    return fiber_multiset == root_multiset


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CharacterSpec:
    """Per factor: the fundamental discriminant of the one quadratic
    character left invariant by that factor's level structure, or 1 for an
    Eichler factor (no invariant character at all)."""

    factors: tuple[int, ...]
    conductor_bound: int = 10**4

    def __post_init__(self):
        if self.conductor_bound > 10**4:
            raise BudgetError("conductor bound capped at 10^4")
        for dd in self.factors:
            if dd == 1:
                continue
            if abs(dd) > self.conductor_bound:
                raise BudgetError(f"|{dd}| exceeds the conductor bound")
            if not _is_fundamental_or_unit(dd):
                raise DomainError(f"{dd} is not a fundamental discriminant")


def _is_fundamental_or_unit(dd: int) -> bool:
    if dd == 1:
        return True
    if dd % 4 == 1:
        return squarefree_part(dd) == dd
    if dd % 4 == 0:
        m = dd // 4
        return m % 4 in (2, 3) and squarefree_part(m) == m
    return False


def _character_product(ds) -> int:
    """Fundamental discriminant of prod chi_{d_i}; 1 for the trivial product."""
    prod = 1
    for dd in ds:
        prod *= dd
    s = squarefree_part(prod) if prod != 0 else 1
    if s == 1:
        return 1
    return s if s % 4 == 1 else 4 * s


def character_average(D, d1: int) -> Fraction:
    """(1/h) sum of the genus character chi_{d1} over the class group;
    exactly 1 for the trivial character, 0 otherwise (orthogonality)."""
    from .quadforms import genus_character

    d = int(D) if not isinstance(D, Discriminant) else D.D
    forms = reduced_forms(d)
    if d1 == 1:
        return Fraction(1)
    total = sum(genus_character(f, d1, d) for f in forms)
    return Fraction(total, len(forms))


def exceptional_fields(spec: CharacterSpec) -> set[int]:
    """Fundamental discriminants of the nontrivial products Pi chi_i over
    all invariant character tuples; empty for Eichler-type specs."""
    out: set[int] = set()

    def walk(i: int, chosen: list[int]):
        if i == len(spec.factors):
            prod = _character_product(chosen)
            if prod != 1:
                out.add(prod)
            return
        walk(i + 1, chosen + [1])
        if spec.factors[i] != 1:
            walk(i + 1, chosen + [spec.factors[i]])

    walk(0, [])
    return out


# ---------------------------------------------------------------------------
# Scan driver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanConfig:
    primes: tuple[int, ...]
    dmin: int
    dmax: int
    fundamental_only: bool = True
    split_filter: tuple[int, int] | None = None
    coprime_to: tuple[int, ...] = ()
    y_cut: float = 2.0
    seed: int = 0
    threads: int = 1
    cache_dir: str | None = None

    def validate(self):
        if self.dmin < 3 or self.dmax < self.dmin:
            raise ConfigError("need 3 <= dmin <= dmax")
        for p in self.primes:
            if not is_prime(p) or p < 5:
                raise ConfigError(f"reduction prime {p} must be a prime >= 5")
        if len(set(self.primes)) != len(self.primes):
            raise ConfigError("reduction primes must be distinct")
        if self.split_filter is not None:
            q1, q2 = self.split_filter
            for q in (q1, q2):
                if not is_prime(q) or q % 2 == 0:
                    raise ConfigError(f"split-filter prime {q} must be an odd prime")
            if set(self.split_filter) & set(self.primes):
                raise ConfigError("split filter overlaps reduction primes")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def canonical_json(self) -> str:
        data = {
            "primes": list(self.primes),
            "dmin": self.dmin,
            "dmax": self.dmax,
            "fundamental_only": self.fundamental_only,
            "split_filter": list(self.split_filter) if self.split_filter else None,
            "coprime_to": list(self.coprime_to),
            "y_cut": self.y_cut,
            "seed": self.seed,
        }
        return json.dumps(data, sort_keys=True)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ScanRow:
    D: int
    h: int
    tv: Fraction
    chi2: float
    surjective: bool
    min_im: float
    box_mass_y2: Fraction


@dataclass(frozen=True)
class ScanReport:
    config: ScanConfig
    rows: tuple[ScanRow, ...]
    medians: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "version": __version__,
            "config_hash": self.config.digest(),
            "config": json.loads(self.config.canonical_json()),
            "rows": [
                {
                    "D": str(r.D),
                    "h": r.h,
                    "tv": _frac_str(r.tv),
                    "chi2": _float_str(r.chi2),
                    "surjective": r.surjective,
                    "min_im": _float_str(r.min_im),
                    "box_mass_y2": _frac_str(r.box_mass_y2),
                }
                for r in self.rows
            ],
            "tv_medians_dyadic": {k: _float_str(v) for k, v in sorted(self.medians.items())},
        }
        return json.dumps(payload, sort_keys=True)

    def to_csv(self) -> str:
        lines = [
            f"# version={__version__} config_hash={self.config.digest()}",
            "D,h,primes,tv,chi2,surjective,min_im,box_mass_y2",
        ]
        primes = ";".join(str(p) for p in self.config.primes)
        for r in self.rows:
            lines.append(
                ",".join(
                    [
                        str(r.D),
                        str(r.h),
                        primes,
                        _frac_str(r.tv),
                        _float_str(r.chi2),
                        "1" if r.surjective else "0",
                        _float_str(r.min_im),
                        _frac_str(r.box_mass_y2),
                    ]
                )
            )
        return "\n".join(lines) + "\n"


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _float_str(x: float) -> str:
    return f"{x:.12g}"


def _scan_one(args) -> ScanRow:
    d, primes, y_cut = args
    jd = joint_reduce(d, primes)
    _, stats = reduce_archimedean(d, y_cut=y_cut)
    return ScanRow(
        D=d,
        h=jd.h,
        tv=jd.tv,
        chi2=jd.chi2,
        surjective=jd.surjective,
        min_im=stats.min_im,
        box_mass_y2=stats.mass_y_at_least,
    )


def scan(config: ScanConfig) -> ScanReport:
    """Per-admissible-D joint reduction statistics plus dyadic medians."""
    config.validate()
    discs = list(
        admissible_discriminants(
            inert=config.primes,
            split=config.split_filter or (),
            coprime_to=tuple(config.coprime_to) + tuple(config.primes),
            abs_range=(config.dmin, config.dmax),
            fundamental_only=config.fundamental_only,
        )
    )
    jobs = [(dd.D, config.primes, config.y_cut) for dd in discs]
    if config.threads > 1 and len(jobs) > 1:
        import concurrent.futures as cf

        with cf.ProcessPoolExecutor(max_workers=config.threads) as ex:
            rows = list(ex.map(_scan_one, jobs, chunksize=8))
    else:
        rows = [_scan_one(j) for j in jobs]
    rows.sort(key=lambda r: (-r.D, r.D))
    medians: dict[str, float] = {}
    by_band: dict[int, list[float]] = {}
    for r in rows:
        band = abs(r.D).bit_length() - 1
        by_band.setdefault(band, []).append(float(r.tv))
    for band, vals in by_band.items():
        vals.sort()
        n = len(vals)
        med = vals[n // 2] if n % 2 else (vals[n // 2 - 1] + vals[n // 2]) / 2
        medians[f"2^{band}..2^{band + 1}"] = med
    return ScanReport(config=config, rows=tuple(rows), medians=medians)
