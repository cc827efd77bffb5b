"""Verma modules over gl_n in a PBW basis of lowering monomials.

A basis vector is a word ``e_{i1 j1}^{k1} ... e_{ir jr}^{kr} v`` (all
``i > j``) whose factors appear in the module's fixed total order of the
lowering generators.  Vectors are sparse maps from such words to
rational coefficients.  Acting with any ``e_ab`` straightens the result
back into the basis using ``[e_ab, e_cd] = d_bc e_ad - d_da e_cb``.
"""

from __future__ import annotations

import functools
from collections import defaultdict
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .exact import format_rational, rational

# A monomial is a tuple of (i, j, exponent) triples in module order.
Monomial = tuple


class MixedWeight(ValueError):
    """Terms of a vector live in different weight spaces."""


class ModuleVector:
    """Sparse finite linear combination of PBW monomials applied to ``v``.

    Zero coefficients are never stored.  Treat instances as immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        self.terms = {m: mpq(c) for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def highest(cls) -> "ModuleVector":
        return cls({(): 1})

    @classmethod
    def _raw(cls, terms: dict) -> "ModuleVector":
        vec = cls.__new__(cls)
        vec.terms = {m: c for m, c in terms.items() if c != 0}
        return vec

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def __eq__(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return ModuleVector._raw(out)

    def __neg__(self):
        return ModuleVector._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if scalar == 0:
            return ModuleVector()
        scalar = mpq(scalar)
        return ModuleVector._raw({m: c * scalar for m, c in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / mpq(scalar))

    def coefficient(self, monomial: Monomial) -> mpq:
        return self.terms.get(tuple(monomial), mpq(0))

    def monomials(self) -> list[Monomial]:
        return sorted(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = [f"({format_rational(c)})*{monomial_str(m)}" for m, c in self]
        return " + ".join(parts)


def monomial_str(mono: Monomial) -> str:
    if not mono:
        return "v"
    factors = []
    for i, j, k in mono:
        factors.append(f"e{i}{j}" if k == 1 else f"e{i}{j}^{k}")
    return " ".join(factors) + " v"


def lowering_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, n + 1) for j in range(1, i)]


def standard_order(n: int) -> tuple[tuple[int, int], ...]:
    """``e_ij`` left of ``e_kl`` iff ``i > k``, or ``i = k`` and ``j > l``."""
    return tuple((i, j) for i in range(n, 0, -1) for j in range(i - 1, 0, -1))


def plan_order(n: int, cut) -> tuple[tuple[int, int], ...]:
    """PBW order induced by recursive ``gl_m + gl_{n-m}`` splittings.

    ``cut(r)`` gives the split point used at rank ``r``.  The cross block
    ``e_ij`` (``i > m >= j``) comes first, then the order for ``gl_m`` on
    indices ``1..m``, then the order for ``gl_{n-m}`` shifted by ``m``.
    For ``n = 4`` with cuts 2, 1, 1 this is
    ``e32 e31 e42 e41 e21 e43``.
    """
    if n <= 1:
        return ()
    m = cut(n)
    cross = [(i, j) for i in range(m + 1, n + 1) for j in range(m, 0, -1)]
    left = list(plan_order(m, cut))
    right = [(i + m, j + m) for i, j in plan_order(n - m, cut)]
    return tuple(cross + left + right)


class VermaModule:
    """The Verma module of highest weight ``weight`` over ``gl_n``.

    ``order`` lists the lowering generators left to right; any total
    order gives a PBW basis.  The default is :func:`standard_order`.
    """

    def __init__(self, weight: Sequence, order: Sequence | None = None):
        self.weight = tuple(rational(w) for w in weight)
        self.n = len(self.weight)
        self.order = tuple(order) if order is not None else standard_order(self.n)
        if sorted(self.order) != sorted(lowering_pairs(self.n)):
            raise ValueError(f"order must list each lowering pair of gl_{self.n} once")
        self._pos = {pair: k for k, pair in enumerate(self.order)}
        self._cache: dict = {}

    def __repr__(self):
        w = ",".join(format_rational(v) for v in self.weight)
        return f"VermaModule(n={self.n}, weight=({w}))"

    # -- basis level -------------------------------------------------------

    def _check(self, a, b):
        if not (1 <= a <= self.n and 1 <= b <= self.n):
            raise IndexError(f"generator e_{a}{b} outside gl_{self.n}")

    def cartan_eigenvalue(self, a: int, mono: Monomial):
        value = self.weight[a - 1]
        for i, j, k in mono:
            if i == a:
                value += k
            if j == a:
                value -= k
        return value

    def _act_mono(self, a: int, b: int, mono: Monomial) -> dict:
        key = (a, b, mono)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        result = self._act_uncached(a, b, mono)
        self._cache[key] = result
        return result

    def _act_uncached(self, a, b, mono):
        if a == b:
            value = self.cartan_eigenvalue(a, mono)
            return {mono: value} if value != 0 else {}
        if not mono:
            return {} if a < b else {((a, b, 1),): mpq(1)}
        c, d, k = mono[0]
        if a > b and self._pos[(a, b)] <= self._pos[(c, d)]:
            if (a, b) == (c, d):
                return {((c, d, k + 1),) + mono[1:]: mpq(1)}
            return {((a, b, 1),) + mono: mpq(1)}
        rest = mono[1:] if k == 1 else ((c, d, k - 1),) + mono[1:]
        out = defaultdict(mpq)
        # e_ab X rest = X (e_ab rest) + [e_ab, X] rest,  X = e_cd
        for m2, c2 in self._act_mono(a, b, rest).items():
            for m3, c3 in self._act_mono(c, d, m2).items():
                out[m3] += c2 * c3
        if b == c:
            for m3, c3 in self._act_mono(a, d, rest).items():
                out[m3] += c3
        if d == a:
            for m3, c3 in self._act_mono(c, b, rest).items():
                out[m3] -= c3
        return {m: v for m, v in out.items() if v != 0}

    # -- vector level ------------------------------------------------------

    def act(self, a: int, b: int, vec: ModuleVector) -> ModuleVector:
        """``e_ab . vec`` expanded in the PBW basis."""
        self._check(a, b)
        out = defaultdict(mpq)
        for mono, coeff in vec.terms.items():
            for m2, c2 in self._act_mono(a, b, mono).items():
                out[m2] += coeff * c2
        return ModuleVector._raw(out)

    def apply_word(self, word: Iterable[tuple[int, int]], vec: ModuleVector) -> ModuleVector:
        """Apply the product ``e_{w1} e_{w2} ... e_{wk}``; the rightmost acts first."""
        for a, b in reversed(list(word)):
            vec = self.act(a, b, vec)
        return vec

    def apply_monomial(self, q: Mapping[tuple[int, int], int], vec: ModuleVector) -> ModuleVector:
        """Apply ``prod_i prod_j e_ij^{q_ij}`` in written order (outer ``i``, inner ``j``
        ascending), the rightmost factor first."""
        word = []
        for (i, j) in sorted(q):
            if i <= j:
                raise ValueError(f"e_{i}{j} is not a lowering generator")
            word.extend([(i, j)] * q[(i, j)])
        return self.apply_word(word, vec)

    def basis_vector(self, mono: Monomial) -> ModuleVector:
        """Straighten an arbitrary lowering word (given as triples) into this basis."""
        word = [(i, j) for i, j, k in mono for _ in range(k)]
        return self.apply_word(word, ModuleVector.highest())

    def express(self, vec: ModuleVector) -> ModuleVector:
        """Rewrite a vector given in another module's PBW order into this one."""
        out = ModuleVector()
        for mono, coeff in vec.terms.items():
            out = out + self.basis_vector(mono) * coeff
        return out

    def normalize(self, vec: ModuleVector) -> ModuleVector:
        return self.express(vec)

    def weight_shift(self, mono: Monomial) -> tuple[int, ...]:
        shift = [0] * self.n
        for i, j, k in mono:
            shift[i - 1] += k
            shift[j - 1] -= k
        return tuple(shift)

    def weight_of(self, vec: ModuleVector) -> tuple:
        """The common ``gl_n`` weight of all terms of ``vec``."""
        if not vec:
            raise ValueError("the zero vector has no weight")
        shifts = {self.weight_shift(m) for m in vec.terms}
        if len(shifts) != 1:
            raise MixedWeight(f"vector mixes weight shifts {sorted(shifts)}")
        (shift,) = shifts
        return tuple(w + s for w, s in zip(self.weight, shift))


@functools.lru_cache(maxsize=64)
def _module(weight: tuple, order: tuple | None) -> VermaModule:
    return VermaModule(weight, order)


def module_for(lam: Sequence, order: Sequence | None = None) -> VermaModule:
    return _module(tuple(rational(v) for v in lam), tuple(order) if order else None)


def act_generator(a: int, b: int, vec: ModuleVector, lam: Sequence, order=None) -> ModuleVector:
    return module_for(lam, order).act(a, b, vec)


def apply_monomial(q: Mapping, vec: ModuleVector, lam: Sequence, order=None) -> ModuleVector:
    return module_for(lam, order).apply_monomial(q, vec)


def weight_of(vec: ModuleVector, lam: Sequence) -> tuple:
    return module_for(lam).weight_of(vec)


def shift_word(mono: Monomial, offset: int) -> list[tuple[int, int]]:
    """Expand a monomial into a generator word with all indices shifted."""
    return [(i + offset, j + offset) for i, j, k in mono for _ in range(k)]


def apply_embedded(
    module: VermaModule, sub_vector: ModuleVector, offset: int, vec: ModuleVector
) -> ModuleVector:
    """Act on ``vec`` with the operator whose PBW expansion on a subalgebra
    highest weight vector is ``sub_vector``.

    Valid when ``vec`` is singular for the ``gl_r`` on indices
    ``offset+1..offset+r`` with the same weight ``sub_vector`` was built on.
    """
    out = defaultdict(mpq)
    for mono, coeff in sub_vector.terms.items():
        image = module.apply_word(shift_word(mono, offset), vec)
        for m2, c2 in image.terms.items():
            out[m2] += coeff * c2
    return ModuleVector._raw(out)
