import itertools

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from nestedbethe.verma import (
    MixedWeight,
    ModuleVector,
    VermaModule,
    act_generator,
    apply_embedded,
    apply_monomial,
    plan_order,
    standard_order,
    weight_of,
)

LAM3 = (mpq(5, 2), mpq(-1, 3), mpq(7))
LAM4 = (mpq(3), mpq(1, 2), mpq(-2), mpq(9, 7))
v = ModuleVector.highest()


def test_standard_order_n3():
    assert standard_order(3) == ((3, 2), (3, 1), (2, 1))


def test_plan_order_matches_four_site_example():
    cut = {4: 2, 2: 1}.__getitem__
    assert plan_order(4, cut) == ((3, 2), (3, 1), (4, 2), (4, 1), (2, 1), (4, 3))


def test_raising_kills_highest_vector():
    assert not act_generator(1, 2, v, LAM3)


def test_cartan_on_highest():
    assert act_generator(2, 2, v, LAM3) == v * LAM3[1]


def test_e12_on_e21():
    e21v = act_generator(2, 1, v, LAM3)
    assert act_generator(1, 2, e21v, LAM3) == v * (LAM3[0] - LAM3[1])


def test_straightening_e21_e32():
    module = VermaModule(LAM3)
    e32v = module.act(3, 2, v)
    out = module.act(2, 1, e32v)
    # e21 e32 = e32 e21 - e31
    expected = ModuleVector({((3, 2, 1), (2, 1, 1)): 1, ((3, 1, 1),): -1})
    assert out == expected


def test_apply_monomial_basics():
    assert apply_monomial({}, v, LAM3) == v
    assert apply_monomial({(2, 1): 1}, v, LAM3) == ModuleVector({((2, 1, 1),): 1})
    with pytest.raises(ValueError):
        apply_monomial({(1, 2): 1}, v, LAM3)


def test_cross_cut_monomials_commute():
    module = VermaModule(LAM4)
    a = module.apply_word([(3, 1), (4, 2)], v)
    b = module.apply_word([(4, 2), (3, 1)], v)
    assert a == b
    for m in (1, 2, 3):
        cross = [(i, j) for i in range(m + 1, 5) for j in range(1, m + 1)]
        for p, q in itertools.combinations(cross, 2):
            w = module.basis_vector(((2, 1, 1), (4, 3, 1)))
            assert module.apply_word([p, q], w) == module.apply_word([q, p], w)


def test_weight_of():
    assert weight_of(v, LAM3) == LAM3
    e21v = act_generator(2, 1, v, LAM3)
    assert weight_of(e21v, LAM3) == (LAM3[0] - 1, LAM3[1] + 1, LAM3[2])
    with pytest.raises(MixedWeight):
        weight_of(v + e21v, LAM3)


def _small_vectors(n):
    pairs = standard_order(n)
    word = st.lists(st.sampled_from(pairs), max_size=3)
    return st.lists(st.tuples(word, st.integers(-5, 5)), min_size=1, max_size=3)


def _build(module, spec):
    out = ModuleVector()
    for word, c in spec:
        out = out + module.apply_word(word, v) * c
    return out


@given(_small_vectors(3))
def test_commutator_law_n3(spec):
    module = VermaModule(LAM3)
    w = _build(module, spec)
    idx = range(1, 4)
    for a, b, c, d in itertools.product(idx, repeat=4):
        lhs = module.act(a, b, module.act(c, d, w)) - module.act(c, d, module.act(a, b, w))
        rhs = ModuleVector()
        if b == c:
            rhs = rhs + module.act(a, d, w)
        if d == a:
            rhs = rhs - module.act(c, b, w)
        assert lhs == rhs


def test_commutator_law_n4_on_fixed_vector():
    module = VermaModule(LAM4)
    w = module.basis_vector(((4, 2, 1), (2, 1, 1))) + module.basis_vector(((3, 1, 2),)) * mpq(1, 3)
    idx = range(1, 5)
    for a, b, c, d in itertools.product(idx, repeat=4):
        lhs = module.act(a, b, module.act(c, d, w)) - module.act(c, d, module.act(a, b, w))
        rhs = ModuleVector()
        if b == c:
            rhs = rhs + module.act(a, d, w)
        if d == a:
            rhs = rhs - module.act(c, b, w)
        assert lhs == rhs


@given(_small_vectors(3))
def test_straightening_idempotent_and_weight_additive(spec):
    module = VermaModule(LAM3)
    w = _build(module, spec)
    assert module.normalize(w) == w
    for mono in w.monomials():
        basis = ModuleVector({mono: 1})
        shifted = module.act(3, 1, basis)
        if shifted:
            before = module.weight_of(basis)
            after = module.weight_of(shifted)
            assert after == (before[0] - 1, before[1], before[2] + 1)


def test_express_between_orders():
    plan = VermaModule(LAM4, plan_order(4, {4: 2, 2: 1}.__getitem__))
    std = VermaModule(LAM4)
    w = std.apply_word([(2, 1), (4, 3), (3, 2)], v)
    back = std.express(plan.express(w))
    assert back == w


def test_apply_embedded_shifts_indices():
    module = VermaModule(LAM4)
    sub = ModuleVector({((2, 1, 1),): 3})
    assert apply_embedded(module, sub, 2, v) == module.act(4, 3, v) * 3


def test_order_must_cover_lowering_pairs():
    with pytest.raises(ValueError):
        VermaModule(LAM3, order=((3, 2), (2, 1)))


def test_repr():
    assert repr(ModuleVector()) == "0"
    assert repr(ModuleVector({((2, 1, 2),): mpq(1, 2)})) == "(1/2)*e21^2 v"
