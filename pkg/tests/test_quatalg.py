import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmreduce.errors import BudgetError, CertificateError, DomainError, NotRepresented
from cmreduce.numbase import kronecker, primes_up_to
from cmreduce.quadforms import QuadForm, reduced_forms
from cmreduce.quatalg import (
    Embedding,
    Lattice4,
    Order,
    construct_Bp,
    find_optimal_embedding,
    gross_lattice,
    hilbert_symbol,
    hs_norm_ratio,
    ideal_classes,
    is_same_class,
    killing_check,
    lattice_vectors_with_norm,
    left_ideal_from_class,
    local_norm_surjectivity,
    mat2_model,
    maximal_order,
    order_as_ideal,
    packet_discriminant,
    quaternion_data,
    ramified_places,
    reconstruct_order_from_gross,
    right_order,
    unit_weight,
)


def test_hilbert_symbol_examples():
    assert hilbert_symbol(-1, -1, "inf") == -1
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(-1, -1, 3) == 1
    with pytest.raises(DomainError):
        hilbert_symbol(0, 1, 2)
    with pytest.raises(DomainError):
        hilbert_symbol(1, 1, 6)


def test_hilbert_symbol_product_formula():
    rng = random.Random(11)
    for _ in range(60):
        a = rng.choice([x for x in range(-60, 60) if x])
        b = rng.choice([x for x in range(-60, 60) if x])
        places = {2} | {p for p in primes_up_to(200) if (a * b) % p == 0}
        prod = hilbert_symbol(a, b, "inf")
        for p in places:
            prod *= hilbert_symbol(a, b, p)
        assert prod == 1, (a, b)


def test_hilbert_symbol_bilinearity():
    rng = random.Random(13)
    for p in (2, 3, 5, 7, "inf"):
        for _ in range(40):
            a = rng.choice([x for x in range(-30, 30) if x])
            b = rng.choice([x for x in range(-30, 30) if x])
            c = rng.choice([x for x in range(-30, 30) if x])
            assert hilbert_symbol(a * b, c, p) == hilbert_symbol(a, c, p) * hilbert_symbol(b, c, p)


def test_construct_bp():
    B11 = construct_Bp(11)
    assert (B11.a, B11.b) == (-1, -11)
    assert B11.ramified == frozenset({"inf", 11})
    for p in (5, 7, 13, 23, 37):
        B = construct_Bp(p)
        assert B.ramified == frozenset({"inf", p})
        assert ramified_places(B.a, B.b) == frozenset({"inf", p})
    with pytest.raises(DomainError):
        construct_Bp(2)
    with pytest.raises(DomainError):
        construct_Bp(3)


def test_element_algebra_identities():
    B = construct_Bp(11)
    rng = random.Random(4)

    def rand_el():
        return B.element(*(Fraction(rng.randrange(-9, 10), rng.randrange(1, 5)) for _ in range(4)))

    for _ in range(200):
        x, y = rand_el(), rand_el()
        assert (x * y).norm() == x.norm() * y.norm()
        # Cayley-Hamilton: x^2 - Tr(x) x + Nr(x) = 0
        lhs = x * x - x.scale(x.trace()) + B.one().scale(x.norm())
        assert lhs == B.element(0, 0, 0, 0)
        assert (x * y).conj() == y.conj() * x.conj()


@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20),
       st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20))
@settings(max_examples=150, deadline=None)
def test_norm_multiplicative_property(x0, x1, x2, x3, y0, y1, y2, y3):
    B = construct_Bp(5)
    x = B.element(x0, x1, x2, x3)
    y = B.element(y0, y1, y2, y3)
    assert (x * y).norm() == x.norm() * y.norm()


def test_mat2_order_gram_det_is_one():
    # pre-build oracle: the Mat2(Z) model has |det Gram(Trd(e_i conj(e_j)))| = 1
    B = mat2_model()
    half = Fraction(1, 2)
    e11 = B.element(half, half, 0, 0)
    e22 = B.element(half, -half, 0, 0)
    e12 = B.element(0, 0, half, half)
    e21 = B.element(0, 0, half, -half)
    lat = Lattice4.from_elements(B, [e11, e12, e21, e22])
    order = Order(lattice=lat)
    assert order.is_multiplicatively_closed()
    assert order.reduced_discriminant == 1
    # sanity: the quaternion model reproduces matrix multiplication
    assert e11 * e12 == e12 and e12 * e21 == e11 and e21 * e12 == e22


def test_maximal_order_saturation():
    B = construct_Bp(11)
    lat0 = Lattice4.from_elements(B, B.basis_elements())
    assert Order(lattice=lat0).reduced_discriminant == 44
    O = maximal_order(B)
    assert O.reduced_discriminant == 11
    assert O.contains(B.one())
    assert O.is_multiplicatively_closed()
    for b in O.basis():
        assert b.trace().denominator == 1 and b.norm().denominator == 1


@pytest.mark.parametrize("p", [5, 7, 11, 13, 23, 31, 43])
def test_maximal_orders_certified(p):
    B = construct_Bp(p)
    O = maximal_order(B)
    assert O.reduced_discriminant == p
    det = abs(_det_of_gram(O))
    assert det == p * p


def _det_of_gram(order):
    from cmreduce.quatalg import _det4

    T = order.lattice.trace_gram()
    num = _det4(T)
    return Fraction(num, order.lattice.den**8)


def test_gross_lattice():
    B = construct_Bp(11)
    O = maximal_order(B)
    gl = gross_lattice(O)
    for v in gl.basis():
        assert v.trace() == 0
    # 2i is in the Gross lattice whenever i is in the order
    i_el = B.element(0, 1, 0, 0)
    if O.contains(i_el):
        assert gl.coordinates(i_el.scale(2)) is not None
    # Nr in 4Z reconstruction returns the order itself
    rec = reconstruct_order_from_gross(gl)
    assert rec == O.lattice


def test_find_optimal_embedding():
    B = construct_Bp(11)
    O = maximal_order(B)
    emb = find_optimal_embedding(O, -4)
    assert emb.v.trace() == 0 and emb.v.norm() == 4
    assert (emb.v * emb.v) == B.element(-4, 0, 0, 0)
    with pytest.raises(NotRepresented):
        find_optimal_embedding(O, -7)  # kronecker(-7, 11) = +1, split
    assert kronecker(-7, 11) == 1
    # -3 is inert at 11 but lives on the weight-3 class: the constructed O
    # has unit weight 2 (it hosts Z[i]), so -3 must fail here and succeed
    # in the right order of the other ideal class.
    _, _, cls = quaternion_data(11)
    hosts = []
    for Or in cls.right_orders:
        try:
            emb3 = find_optimal_embedding(Or, -3)
            hosts.append((Or, emb3))
        except NotRepresented:
            pass
    assert len(hosts) == 1
    Or, emb3 = hosts[0]
    assert unit_weight(Or) == 3
    assert emb3.v.norm() == 3
    assert Or.contains(emb3.iota(0, 1))
    assert Or.contains(emb3.iota(3, 2))
    # a large inert discriminant embeds into both classes
    for Or in cls.right_orders:
        embL = find_optimal_embedding(Or, -23)
        assert embL.v.norm() == 23


def test_embedding_optimality_matches_preimage():
    from cmreduce.quatalg import embedding_preimage_lattice

    rng = random.Random(17)
    cases = 0
    for p in (5, 11, 13, 23):
        O = quaternion_data(p)[1]
        for D in range(-3, -120, -1):
            if D % 4 not in (0, 1) or kronecker(D, p) == 1:
                continue
            try:
                emb = find_optimal_embedding(O, D)
            except NotRepresented:
                continue
            # preimage lattice of iota must be exactly Z + Z (D + sqrt(D))/2
            rows = embedding_preimage_lattice(O, emb.v)
            target = Lattice4  # reuse HNF utilities by hand: compare via 2x2
            # expected basis (1, 0), (D/2, 1/2) in (m, n) coordinates
            got = {(Fraction(r[0]), Fraction(r[1])) for r in rows}
            lat = _hnf2(got)
            exp = _hnf2({(Fraction(1), Fraction(0)), (Fraction(D, 2), Fraction(1, 2))})
            assert lat == exp, (p, D)
            cases += 1
            if cases >= 50:
                return
    assert cases >= 50


def _hnf2(vecs):
    den = 1
    for a, b in vecs:
        den = den * a.denominator // math.gcd(den, a.denominator)
        den = den * b.denominator // math.gcd(den, b.denominator)
    rows = [[int(a * den), int(b * den), 0, 0] for a, b in vecs]
    from cmreduce.quatalg import hnf_rows

    h = hnf_rows(rows)
    g = den
    for r in h:
        for x in r:
            g = math.gcd(g, x)
    return (den // g, tuple(tuple(x // g for x in r[:2]) for r in h))


def test_left_ideal_from_class():
    p5 = quaternion_data(5)
    O = p5[1]
    emb = find_optimal_embedding(O, -23)
    forms = reduced_forms(-23)
    principal = left_ideal_from_class(O, emb, forms[0])
    assert principal.reduced_norm == 1
    assert is_same_class(principal, order_as_ideal(O))
    I = left_ideal_from_class(O, emb, QuadForm(2, 1, 3))
    assert I.reduced_norm == 2
    # O * I = I
    prod = O.lattice.product(I.lattice)
    assert prod == I.lattice


def test_is_same_class_properties():
    _, O, cls = quaternion_data(11)
    assert cls.h == 2
    I, J = cls.representatives
    assert is_same_class(I, I)
    assert not is_same_class(I, J)
    # invariance under right multiplication by integral elements
    rng = random.Random(23)
    for _ in range(5):
        x = O.basis()[rng.randrange(4)] + O.basis()[rng.randrange(4)]
        if x.norm() == 0:
            continue
        Ix = type(I)(lattice=I.lattice.right_multiply(x), left_order=I.left_order)
        assert is_same_class(I, Ix)


def test_ideal_classes_examples():
    _, _, cls11 = quaternion_data(11)
    assert cls11.h == 2 and sorted(cls11.weights) == [2, 3]
    assert cls11.mass == Fraction(10, 12)
    _, _, cls13 = quaternion_data(13)
    assert cls13.h == 1 and list(cls13.weights) == [1]
    _, _, cls23 = quaternion_data(23)
    assert cls23.h == 3 and sorted(cls23.weights) == [1, 2, 3]
    assert cls23.mass == Fraction(22, 12)


def test_right_order():
    _, O, cls = quaternion_data(11)
    assert right_order(order_as_ideal(O)).lattice == O.lattice
    for I in cls.representatives:
        Or = right_order(I)
        assert Or.reduced_discriminant == 11
        assert Or.is_multiplicatively_closed()
    # conjugation covariance: right_order(I x) = x^-1 right_order(I) x
    I = cls.representatives[1]
    x = O.basis()[1] + O.basis()[2]
    Ix = type(I)(lattice=I.lattice.right_multiply(x), left_order=I.left_order)
    Or = right_order(I)
    Orx = right_order(Ix)
    conj = Lattice4.from_elements(
        O.alg, [x.inverse() * b * x for b in Or.basis()]
    )
    assert Orx.lattice == conj


def test_unit_weight():
    _, O13, cls13 = quaternion_data(13)
    assert unit_weight(O13) == 1
    _, _, cls11 = quaternion_data(11)
    assert sorted(cls11.weights) == [2, 3]
    # +-1 always present
    assert all(w >= 1 for w in cls11.weights)


def test_killing_identity():
    rng = random.Random(31)
    for p in (5, 11, 13, 23):
        B = construct_Bp(p)
        i_el = B.element(0, 1, 0, 0)
        if B.a == -1:
            # i^2 = -1: ad_i has eigenvalues {0, 2i, -2i}, so trace(ad^2) = -8
            got = killing_check(B, i_el)
            assert got == (Fraction(-8), Fraction(-8))
        for _ in range(100):
            x = B.element(0, rng.randrange(-9, 10), rng.randrange(-9, 10), rng.randrange(-9, 10))
            ad2, minus4nr = killing_check(B, x)
            assert ad2 == minus4nr
    # split model: nilpotent element has (0, 0)
    M = mat2_model()
    nil = M.element(0, 0, 1, 1)
    assert nil.norm() == 0
    assert killing_check(M, nil) == (0, 0)
    for _ in range(100):
        x = M.element(0, rng.randrange(-9, 10), rng.randrange(-9, 10), rng.randrange(-9, 10))
        ad2, minus4nr = killing_check(M, x)
        assert ad2 == minus4nr
    with pytest.raises(DomainError):
        killing_check(M, M.element(1, 0, 0, 0))


def test_packet_discriminant():
    _, O, _ = quaternion_data(5)
    emb = find_optimal_embedding(O, -23)
    assert packet_discriminant(emb) == 23
    _, O11, _ = quaternion_data(11)
    emb4 = find_optimal_embedding(O11, -4)
    assert packet_discriminant(emb4) == 4
    # non-primitive vector: 2 * v has norm 4|D|, fails the primitivity check
    bad = Embedding(disc=emb.disc, v=emb.v.scale(2), order=O)
    with pytest.raises(DomainError):
        packet_discriminant(bad)


def test_hs_norm_ratio():
    import math as m

    assert abs(hs_norm_ratio(-4) - m.sqrt(8)) < 1e-9
    assert abs(hs_norm_ratio(-23) - m.sqrt(8)) < 1e-9
    # conjugation invariance via the exact char-poly route
    from cmreduce.quatalg import _hs_from_ad, _mat2_ad_matrix

    for g in (((1, 2), (0, 1)), ((3, 1), (2, 1)), ((1, 0), (5, 1))):
        got = _hs_from_ad(_mat2_ad_matrix(-23, g), -23)
        assert abs(got - m.sqrt(8)) < 1e-6


def test_local_norm_surjectivity():
    _, O, _ = quaternion_data(11)
    assert local_norm_surjectivity(O, 3, 2)
    assert local_norm_surjectivity(O, 2, 3)
    assert local_norm_surjectivity(O, 11, 1)  # ramified case
    with pytest.raises(BudgetError):
        local_norm_surjectivity(O, 2, 20)
    with pytest.raises(DomainError):
        local_norm_surjectivity(O, 4, 1)


def test_local_norm_surjectivity_lifting_consistency():
    # the Hensel-reduced level agrees with exhaustive enumeration where
    # both are feasible
    from cmreduce.quatalg import _norms_cover

    _, O, _ = quaternion_data(11)
    assert _norms_cover(O, 3, 2) == _norms_cover(O, 3, 1)
    assert _norms_cover(O, 2, 4) == _norms_cover(O, 2, 3)
    assert _norms_cover(O, 5, 2) == _norms_cover(O, 5, 1)


def test_is_same_class_equivalence_relation():
    rng = random.Random(47)
    for p in (11, 23):
        _, O, cls = quaternion_data(p)
        # build assorted ideals by right-multiplying representatives
        ideals = list(cls.representatives)
        for I in cls.representatives:
            x = sum((b.scale(rng.randrange(-2, 3)) for b in O.basis()), O.alg.element(0, 0, 0, 0))
            if x.norm() != 0:
                ideals.append(type(I)(lattice=I.lattice.right_multiply(x), left_order=O))
        for A in ideals:
            assert is_same_class(A, A)
            for Bi in ideals:
                ab = is_same_class(A, Bi)
                assert ab == is_same_class(Bi, A)
                for C in ideals:
                    if ab and is_same_class(Bi, C):
                        assert is_same_class(A, C)
