"""Bethe vectors through the ``gl_m + gl_{n-m}`` splitting.

Three right-hand sides are provided, each equal to ``B_xi(t) v``:

* :func:`splitting_rhs` -- the matrix-entry form of the splitting
  property, built from truncated R-products and T-chains;
* :func:`uprop_rhs` -- the sum over ``q`` and ``S_q`` of ``U~_J U_I``;
* :func:`mainth_rhs` -- the closed combinatorial formula with one pair
  ``(I_0, J_0)`` per ``q``, an extra ``Sym`` over ``t^m`` and ``Phi(t^m)``.

Sub-Bethe vectors for ``gl_m`` (embedded by the identity) and ``gl_{n-m}``
(indices shifted by ``m``) are evaluated either by the direct definition
or recursively through :func:`bethe_recursive`.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from typing import Callable, Mapping

from gmpy2 import mpq

from .combinatorics import (
    L_prefactor,
    L_tilde_prefactor,
    U,
    U_tilde,
    canonical_pair,
    enumerate_Q,
    enumerate_Sq,
    longest_permutation,
    permute_partition,
    phi,
    split_vars,
)
from .exact import PoleError, Shape, VarAssignment, ratio
from .verma import ModuleVector, VermaModule, apply_embedded, plan_order
from .yangian import (
    apply_bethe,
    bethe_letters,
    forward_r_factors,
    operator_chain_sum,
    r_column,
    r_row,
    site,
)

STRATEGIES = ("direct", "recursive")
OPERATOR_ORDERS = ("phi-psi", "psi-phi")


class InvalidPlan(ValueError):
    """A split plan assigned a cut outside ``1..r-1`` for some rank ``r``."""


def default_cut(r: int) -> int:
    return r // 2


def resolve_plan(plan=None) -> Callable[[int], int]:
    """Turn ``None``, an int, a ``{rank: cut}`` mapping or a callable into a cut function."""
    if plan is None:
        base = default_cut
    elif callable(plan):
        base = plan
    elif isinstance(plan, Mapping):
        table = dict(plan)

        def base(r):
            if r not in table:
                raise InvalidPlan(f"split plan has no cut for rank {r}")
            return table[r]
    else:
        raise InvalidPlan(f"unsupported split plan {plan!r}")

    def cut(r: int) -> int:
        m = base(r)
        if not isinstance(m, int) or not 1 <= m < r:
            raise InvalidPlan(f"cut {m!r} out of range for rank {r}")
        return m

    return cut


def _check(n: int, m: int, shape: Shape, point: VarAssignment):
    if shape.n != n or point.shape != shape:
        raise ValueError(f"shape {shape} and point do not describe gl_{n}")
    if not 1 <= m < n:
        raise ValueError(f"cut m={m} out of range for n={n}")


class _SubBethe:
    """Evaluates and caches ``phi_m(B^<m>) psi(B^<n-m>) v`` pieces for one point."""

    def __init__(self, module, m, point, strategy, plan):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        self.module = module
        self.m = m
        self.n = module.n
        self.point = point
        self.strategy = strategy
        self.plan = resolve_plan(plan)
        self._psi = {}
        self._both = {}
        self._sub_modules = {}

    def _apply(self, kind: str, blocks: tuple, vec: ModuleVector) -> ModuleVector:
        if all(len(b) == 0 for b in blocks):
            return vec
        if kind == "phi":
            offset, lam = 0, self.point.lam[: self.m]
        else:
            offset, lam = self.m, self.point.lam[self.m :]
        sub_point = VarAssignment(blocks, self.point.x, lam)
        if self.strategy == "direct":
            return apply_bethe(self.module, sub_point, vec, offset)
        rank = len(lam)
        key = (rank, lam)
        sub_module = self._sub_modules.get(key)
        if sub_module is None:
            sub_module = VermaModule(lam, plan_order(rank, self.plan))
            self._sub_modules[key] = sub_module
        sub_vec = bethe_recursive(rank, sub_point.shape, sub_point, self.plan, sub_module)
        return apply_embedded(self.module, sub_vec, offset, vec)

    def psi(self, ddot: tuple) -> ModuleVector:
        hit = self._psi.get(ddot)
        if hit is None:
            hit = self._apply("psi", ddot, ModuleVector.highest())
            self._psi[ddot] = hit
        return hit

    def phi(self, dot: tuple) -> ModuleVector:
        return self._apply("phi", dot, ModuleVector.highest())

    def both(self, dot: tuple, ddot: tuple, order: str = "phi-psi") -> ModuleVector:
        key = (dot, ddot, order)
        hit = self._both.get(key)
        if hit is not None:
            return hit
        if order == "phi-psi":
            hit = self._apply("phi", dot, self.psi(ddot))
        elif order == "psi-phi":
            hit = self._apply("psi", ddot, self.phi(dot))
        else:
            raise ValueError(f"unknown operator order {order!r}")
        self._both[key] = hit
        return hit


def _t_m_prefactor(point: VarAssignment, m: int) -> mpq:
    value = mpq(1)
    for k, t in enumerate(point.block(m), 1):
        value *= ratio(1, t - point.x, f"t^{m}_{k} - x")
    return value


def _factorials(shape: Shape, m: int, eta: dict, zeta: dict) -> mpq:
    value = mpq(1)
    for a in range(1, m):
        value /= math.factorial(shape[a] - zeta[a])
    for b in range(m + 1, shape.n):
        value /= math.factorial(shape[b] - eta[b])
    return value


def _block_perms(point: VarAssignment, which):
    """Yield full block tuples with blocks in ``which`` permuted independently."""
    blocks = list(point.blocks)
    choices = [list(itertools.permutations(blocks[a - 1])) for a in which]
    for combo in itertools.product(*choices):
        out = list(blocks)
        for a, perm in zip(which, combo):
            out[a - 1] = perm
        yield tuple(out)


def xi_m_zero_rhs(
    n: int, m: int, shape: Shape, point: VarAssignment, strategy="direct", plan=None,
    module: VermaModule | None = None, order: str = "phi-psi",
) -> ModuleVector:
    """``phi_m(B^<m>(t')) psi(B^<n-m>(t'')) v``, the form taken when ``xi_m = 0``."""
    _check(n, m, shape, point)
    if shape[m] != 0:
        raise ValueError(f"xi_{m} = {shape[m]} is not zero")
    module = module or VermaModule(point.lam)
    subs = _SubBethe(module, m, point, strategy, plan)
    return subs.both(point.blocks[: m - 1], point.blocks[m:], order)


def splitting_rhs(
    n: int, m: int, shape: Shape, point: VarAssignment, module: VermaModule | None = None
) -> ModuleVector:
    """``B_xi(t) v`` from the explicit matrix-entry form of the splitting.

    ``sum_{a,b} T(t^m)^a_b [R' T^[m-1]...T^[1]]^{l1}_{l2(a)}
    [T^[m+1]...T^[n-1] R'']^{l2(b)}_{l3} v`` with ``R'`` the forward product of
    ``R^{[j,i]}``, ``1 <= i < j <= m``, and ``R''`` the truncated forward
    product over ``m+1 <= j <= n-1``, ``m <= i < j``.
    """
    _check(n, m, shape, point)
    module = module or VermaModule(point.lam)
    x = point.x
    v = ModuleVector.highest()
    l1, l3 = bethe_letters(shape)
    m_sites = [site(shape, m, k) for k in range(1, shape[m] + 1)]
    t_m = point.block(m)

    # phi side: row l1 of R', then T^[m-1] ... T^[1] with fixed lower letters.
    left_factors = forward_r_factors(shape, point, range(2, m + 1), lambda j: range(1, j))
    left_sites = [site(shape, a, k) for a in range(m - 1, 0, -1) for k in range(1, shape[a] + 1)]
    left_vars = [point.t(a, k) for a in range(m - 1, 0, -1) for k in range(1, shape[a] + 1)]
    left_cols = [l3[s] for s in left_sites]
    phi_words: dict = defaultdict(dict)
    for y, coeff in r_row(left_factors, l1).items():
        a_seq = tuple(y[s] for s in m_sites)
        if any(not 1 <= c <= m for c in a_seq):
            continue
        word = tuple((y[s], c) for s, c in zip(left_sites, left_cols))
        phi_words[a_seq][word] = phi_words[a_seq].get(word, 0) + coeff

    # psi side: T^[m+1] ... T^[n-1] with fixed upper letters, then column l3 of R''.
    right_factors = forward_r_factors(shape, point, range(m + 1, n), lambda j: range(m, j))
    right_sites = [site(shape, a, k) for a in range(m + 1, n) for k in range(1, shape[a] + 1)]
    right_vars = [point.t(a, k) for a in range(m + 1, n) for k in range(1, shape[a] + 1)]
    right_rows = [l1[s] for s in right_sites]
    psi_words: dict = defaultdict(dict)
    for z, coeff in r_column(right_factors, l3).items():
        b_seq = tuple(z[s] for s in m_sites)
        if any(not m < c <= n for c in b_seq):
            continue
        word = tuple((r, z[s]) for s, r in zip(right_sites, right_rows))
        psi_words[b_seq][word] = psi_words[b_seq].get(word, 0) + coeff

    total = ModuleVector()
    for b_seq in sorted(psi_words):
        g_vec = operator_chain_sum(module, psi_words[b_seq], right_vars, x, v)
        if not g_vec:
            continue
        for a_seq in sorted(phi_words):
            fg_vec = operator_chain_sum(module, phi_words[a_seq], left_vars, x, g_vec)
            if not fg_vec:
                continue
            chain = {tuple(zip(a_seq, b_seq)): 1}
            total = total + operator_chain_sum(module, chain, t_m, x, fg_vec)
    return total


def uprop_rhs(
    n: int, m: int, shape: Shape, point: VarAssignment, strategy: str = "direct",
    plan=None, module: VermaModule | None = None, order: str = "phi-psi",
) -> ModuleVector:
    """``B_xi(t) v`` as the sum over ``q in Q_{m,n}`` and ``(I, J) in S_q``."""
    _check(n, m, shape, point)
    module = module or VermaModule(point.lam)
    subs = _SubBethe(module, m, point, strategy, plan)
    x, lam = point.x, point.lam
    t_m = point.block(m)
    perm_blocks = list(range(1, m)) + list(range(m + 1, n))
    total = ModuleVector()
    for q in enumerate_Q(n, m, shape):
        eta, zeta = q.eta, q.zeta
        pairs = enumerate_Sq(q)
        acc = defaultdict(mpq)
        for blocks in _block_perms(point, perm_blocks):
            sv = split_vars(blocks, m, eta, zeta)
            weight = sum(
                (U_tilde(J, sv.dot_tail, t_m) * U(I, sv.ddot_head, t_m) for I, J in pairs),
                mpq(0),
            )
            if weight == 0:
                continue
            weight *= L_prefactor(m, eta, blocks, x, lam) * L_tilde_prefactor(m, zeta, blocks, x, lam)
            acc[(sv.dot_head, sv.ddot_tail)] += weight
        inner = ModuleVector()
        for (dot, ddot), c in sorted(acc.items()):
            if c:
                inner = inner + subs.both(dot, ddot, order) * c
        inner = module.apply_monomial(q.as_dict(), inner)
        total = total + inner * _factorials(shape, m, eta, zeta)
    return total * _t_m_prefactor(point, m)


def mainth_rhs(
    n: int, m: int, shape: Shape, point: VarAssignment, strategy: str = "direct",
    plan=None, module: VermaModule | None = None, fill: str = "row",
    order: str = "phi-psi",
) -> ModuleVector:
    """``B_xi(t) v`` from the combinatorial formula with one pair ``(I_0, J_0)`` per ``q``.

    ``fill`` selects which member of ``S_q`` serves as ``(I_0, J_0)``;
    the result does not depend on it.
    """
    _check(n, m, shape, point)
    module = module or VermaModule(point.lam)
    subs = _SubBethe(module, m, point, strategy, plan)
    x, lam = point.x, point.lam
    M = shape[m]
    reverse = longest_permutation(M)
    dot_blocks = list(range(1, m))
    ddot_blocks = list(range(m + 1, n))
    total = ModuleVector()
    for q in enumerate_Q(n, m, shape):
        eta, zeta = q.eta, q.zeta
        I0, J0 = canonical_pair(q, fill)
        I_check = permute_partition(reverse, I0)

        # phi side depends on t^m only through U~(..., reversed t^m).
        dot_terms = []
        for blocks in _block_perms(point, dot_blocks):
            sv = split_vars(blocks, m, eta, zeta)
            dot_terms.append((sv.dot_head, sv.dot_tail, L_tilde_prefactor(m, zeta, blocks, x, lam)))
        ddot_terms = []
        for blocks in _block_perms(point, ddot_blocks):
            sv = split_vars(blocks, m, eta, zeta)
            ddot_terms.append((sv.ddot_tail, sv.ddot_head, L_prefactor(m, eta, blocks, x, lam)))

        acc = defaultdict(mpq)
        for t_m in itertools.permutations(point.block(m)):
            try:
                weight_m = phi(t_m)
            except ZeroDivisionError as exc:
                raise PoleError(f"Phi pole at t^m = {t_m}") from exc
            if weight_m == 0:
                continue
            t_m_rev = t_m[::-1]
            dot_acc = defaultdict(mpq)
            for head, tail, pre in dot_terms:
                dot_acc[head] += pre * U_tilde(J0, tail, t_m_rev)
            ddot_acc = defaultdict(mpq)
            for tail, head, pre in ddot_terms:
                ddot_acc[tail] += pre * U(I_check, head, t_m)
            for k1, c1 in dot_acc.items():
                for k2, c2 in ddot_acc.items():
                    acc[(k1, k2)] += weight_m * c1 * c2
        inner = ModuleVector()
        for (dot, ddot), c in sorted(acc.items()):
            if c:
                inner = inner + subs.both(dot, ddot, order) * c
        inner = module.apply_monomial(q.as_dict(), inner)
        scale = _factorials(shape, m, eta, zeta) / q.factorial_product()
        total = total + inner * scale
    assert M == len(point.block(m))
    return total * _t_m_prefactor(point, m)


def bethe_recursive(
    n: int, shape: Shape, point: VarAssignment, plan=None, module: VermaModule | None = None
) -> ModuleVector:
    """``B_xi(t) v`` by iterating the combinatorial formula down to rank 1.

    ``plan`` picks the cut at each rank (default ``floor(r/2)``).  With
    ``module`` ordered by :func:`plan_order` the output coefficients are
    the coordinates in the PBW basis that the plan's chain of embeddings
    produces.
    """
    if shape.n != n or point.shape != shape:
        raise ValueError(f"shape {shape} and point do not describe gl_{n}")
    cut = resolve_plan(plan)
    if n == 1 or shape.sites == 0:
        return ModuleVector.highest()
    module = module or VermaModule(point.lam)
    return mainth_rhs(n, cut(n), shape, point, strategy="recursive", plan=cut, module=module)
