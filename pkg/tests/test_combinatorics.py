import itertools
import math
import random

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from nestedbethe import combinatorics as comb
from nestedbethe.checks import sym_factorization_sides, wstat_sides
from nestedbethe.exact import Shape, random_rational, sample_assignment, symmetrize


def test_seq_to_partitions_examples():
    I, J = comb.seq_to_partitions((1, 1, 2), (3, 3, 3), 2, 3)
    assert J == ((1, 2), (3,))
    I, J = comb.seq_to_partitions((1, 2), (4, 3), 2, 4)
    assert I == ((2,), (1,))
    assert comb.eta_of_partition(I, 2) == {3: 1}


@given(st.data())
def test_sequence_roundtrip(data):
    n = data.draw(st.integers(2, 5))
    m = data.draw(st.integers(1, n - 1))
    M = data.draw(st.integers(0, 4))
    a = tuple(data.draw(st.lists(st.integers(1, m), min_size=M, max_size=M)))
    b = tuple(data.draw(st.lists(st.integers(m + 1, n), min_size=M, max_size=M)))
    I, J = comb.seq_to_partitions(a, b, m, n)
    assert comb.partitions_to_seqs(I, J, m) == (a, b)
    assert comb.seq_to_partitions(*comb.partitions_to_seqs(I, J, m), m, n) == (I, J)


def test_enumerate_Q_examples():
    (q,) = comb.enumerate_Q(2, 1, Shape((3,)))
    assert q[2, 1] == 3
    qs = comb.enumerate_Q(4, 2, Shape((1, 1, 1)))
    assert len(qs) == 4 and all(q.total == 1 for q in qs)
    (q,) = comb.enumerate_Q(4, 2, Shape((0, 2, 0)))
    assert q.as_dict() == {(3, 2): 2}


def test_enumerate_Q_is_deterministic_and_valid():
    s = Shape((2, 3, 1))
    qs = comb.enumerate_Q(4, 2, s)
    assert qs == comb.enumerate_Q(4, 2, s)
    for q in qs:
        assert comb.in_Q(q, s)
        assert all(q.eta[k] <= s[k] for k in q.eta)
        assert all(q.zeta[l] <= s[l] for l in q.zeta)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_Sq_cardinality(n):
    for xi in itertools.product(range(4), repeat=n - 1):
        s = Shape(xi)
        for m in range(1, n):
            for q in comb.enumerate_Q(n, m, s):
                pairs = comb.enumerate_Sq(q)
                assert len(pairs) == math.factorial(s[m]) // q.factorial_product()
                assert len(set(pairs)) == len(pairs)
                for I, J in pairs:
                    counts = comb.intersection_counts(I, J, m)
                    assert all(counts[sp] == q[sp] for sp, _ in q.cells())


@pytest.mark.parametrize("fill", ["row", "column"])
def test_canonical_pair_belongs_to_Sq(fill):
    for q in comb.enumerate_Q(4, 2, Shape((2, 3, 2))):
        assert comb.canonical_pair(q, fill) in comb.enumerate_Sq(q)


def test_single_cell_q_has_one_pair():
    q = comb.QMatrix(3, 1, ((0,), (3,)))
    assert comb.enumerate_Sq(q) == [(((), (1, 2, 3)), ((1, 2, 3),))]


def test_U_degenerate_cases():
    assert comb.U(((),), [], ()) == 1
    assert comb.U_tilde(((1, 2),), [], (mpq(1), mpq(5))) == 1
    assert comb.U_tilde(((), (1,)), [()], (mpq(3),)) == 1


def test_U_single_variable():
    v, base = mpq(7, 2), mpq(-1, 3)
    assert comb.U(((), (1,)), [(v,)], (base,)) == 1 / (v - base)
    assert comb.U(((1,), ()), [()], (base,)) == 1


def test_phi_values():
    assert comb.phi([mpq(4)]) == 1
    assert comb.phi([mpq(3), mpq(1)]) == mpq(1, 2)


def test_W_equals_U_for_singleton_layers():
    I = ((1,), (2,), ())
    layers = [(mpq(5, 3),), ()]
    base = (mpq(1, 7), mpq(9))
    assert comb.W(I, layers, base) == comb.U(I, layers, base)


def test_W_two_variable_layer_is_two_term_sum():
    I = ((), (1, 2))
    a, b = mpq(3), mpq(-8, 5)
    base = (mpq(1, 2), mpq(13))
    assert comb.W(I, [(a, b)], base) == comb.U(I, [(a, b)], base) + comb.U(I, [(b, a)], base)


def _random_partition(rng, M, parts):
    labels = [rng.randrange(parts) for _ in range(M)]
    return tuple(tuple(i + 1 for i in range(M) if labels[i] == p) for p in range(parts))


def _exchange_holds(utilde, seed):
    rng = random.Random(seed)
    m, M = 3, 3
    J = _random_partition(rng, M, m)
    lens = [len(comb._merged(J[:l])) for l in range(1, m)]
    layers = [[random_rational(rng) for _ in range(k)] for k in lens]
    z = [random_rational(rng) for _ in range(M)]
    flat, groups = comb._layer_groups(layers)

    def Wt(parts, zz):
        return symmetrize(lambda vals: utilde(parts, comb._split(vals, layers), zz), flat, groups)

    results = []
    for a in range(1, M):
        zs = list(z)
        zs[a - 1], zs[a] = zs[a], zs[a - 1]
        d = z[a - 1] - z[a]
        sJ = comb.permute_partition(comb.transposition(a, a + 1), J)
        results.append(Wt(J, zs) == d / (d - 1) * Wt(sJ, z) - Wt(J, z) / (d - 1))
    return all(results)


@pytest.mark.parametrize("seed", range(5))
def test_W_tilde_exchange_relation(seed):
    assert _exchange_holds(comb.U_tilde, seed)


def test_W_tilde_exchange_fails_for_printed_same_layer_range():
    # the same-layer factors on the top layer break the exchange relation
    assert not all(_exchange_holds(comb.U_tilde_as_printed, seed) for seed in range(5))


@pytest.mark.parametrize("seed", range(5))
def test_W_exchange_relation(seed):
    rng = random.Random(seed)
    M, parts = 3, 3
    I = _random_partition(rng, M, parts)
    lens = [len(comb._merged(I[h:])) for h in range(1, parts)]
    layers = [[random_rational(rng) for _ in range(k)] for k in lens]
    z = [random_rational(rng) for _ in range(M)]
    for a in range(1, M):
        zs = list(z)
        zs[a - 1], zs[a] = zs[a], zs[a - 1]
        d = z[a] - z[a - 1]
        sI = comb.permute_partition(comb.transposition(a, a + 1), I)
        assert comb.W(I, layers, zs) == d / (d - 1) * comb.W(sI, layers, z) - comb.W(I, layers, z) / (d - 1)


def _random_pair(seed, k, l):
    rng = random.Random(seed)
    xs = [random_rational(rng) for _ in range(l)]
    coeffs = [random_rational(rng) for _ in range(k)]
    F = lambda v: sum(c * x ** (i + 1) for i, (c, x) in enumerate(zip(coeffs, v))) / (1 + v[0] ** 2)
    a = random_rational(rng)
    G = lambda v: a * sum(v[:k], mpq(0)) ** 2 + math.prod(v[k:], start=mpq(1)) + sum(v[:k], mpq(0)) * sum(v[k:], mpq(0))
    return F, G, xs


@pytest.mark.parametrize("k,l", [(1, 2), (2, 3), (1, 3), (2, 2), (3, 3)])
def test_sym_factorization(k, l):
    F, G, xs = _random_pair(f"{k}/{l}", k, l)
    lhs, rhs = sym_factorization_sides(F, G, xs, k)
    assert lhs == rhs


def test_sym_factorization_with_sums_swapped_fails():
    # Sym over all variables outside, over the first k inside; the other nesting is not an identity
    F, G, xs = _random_pair("swap", 2, 3)
    full, head = [list(range(3))], [list(range(2))]
    lhs = symmetrize(lambda v: F(v[:2]) * G(v), xs, full)
    swapped = symmetrize(
        lambda v: symmetrize(lambda w: F(w[:2]), v, full) * G(v), xs, head
    ) / math.factorial(2)
    assert lhs != swapped


@pytest.mark.parametrize("n,m,xi", [(3, 1, (1, 2)), (3, 2, (2, 2)), (4, 2, (1, 3, 1)), (4, 2, (2, 3, 2)), (4, 3, (1, 2, 3))])
def test_permutation_sum_identity(n, m, xi):
    s = Shape(xi)
    p = sample_assignment(s, "wstat")
    for q in comb.enumerate_Q(n, m, s):
        sv = comb.split_vars(p.blocks, m, q.eta, q.zeta)
        I, J = comb.canonical_pair(q)
        lhs, rhs = wstat_sides(I, J, sv.ddot_head, sv.dot_tail, p.block(m))
        assert lhs == rhs


def test_L_prefactor_examples():
    blocks = ((mpq(1, 3),), (mpq(17, 2),))
    x, lam = mpq(-2), (mpq(1), mpq(4, 5), mpq(3))
    t = blocks[1][0]
    assert comb.L_prefactor(1, {2: 1}, blocks, x, lam) == (t - x + lam[1]) / (t - x)
    assert comb.L_prefactor(1, {2: 0}, blocks, x, lam) == 1
    assert comb.L_prefactor(2, {}, blocks, x, lam) == 1
    assert comb.L_tilde_prefactor(2, {1: 0}, blocks, x, lam) == 1
    u = blocks[0][0]
    assert comb.L_tilde_prefactor(2, {1: 1}, blocks, x, lam) == (u - x + lam[1]) / (u - x)


def test_L_same_block_factor():
    blocks = ((mpq(1),), (mpq(5), mpq(-3, 2)))
    x, lam = mpq(0), (mpq(1), mpq(2), mpq(3))
    with_factor = comb.L_prefactor(1, {2: 1}, blocks, x, lam)
    without = comb.L_prefactor(1, {2: 1}, blocks, x, lam, same_block=False)
    ti, tj = blocks[1]
    assert with_factor == without * (tj - ti + 1) / (tj - ti)


def test_split_vars_restores_blocks():
    blocks = ((1, 2, 3), (4, 5), (6, 7, 8))
    sv = comb.split_vars(blocks, 2, {3: 1}, {1: 2})
    assert sv.dot_head[0] + sv.dot_tail[0] == blocks[0] and sv.dot_tail[0] == (2, 3)
    assert sv.ddot_head[0] + sv.ddot_tail[0] == blocks[2] and sv.ddot_head[0] == (6,)
    assert sv.t_m_reversed == (5, 4)
