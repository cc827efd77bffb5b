"""Direct evaluation of nested Bethe vectors from the ordered T- and R-products.

Auxiliary-space letters run over ``1..r`` for the rank-``r`` algebra and
sites are numbered from 0.  The site of ``t^j_k`` is ``xi^{j-1} + k - 1``.
An R-product is kept as the ordered list of its two-site factors
``(p, q, u)`` meaning ``R^{(p,q)}(u) = 1 + P_{pq}/u``; the numeric matrix is
only ever materialized column by column.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from typing import Sequence

from gmpy2 import mpq

from .exact import PoleError, Shape, VarAssignment, rational, ratio
from .verma import ModuleVector, VermaModule

RFactor = tuple  # (site p, site q, spectral argument u)


def r_entry(u, a: int, b: int, c: int, d: int) -> mpq:
    """``R^{ab}_{cd}(u) = d_ac d_bd + d_ad d_bc / u``."""
    value = mpq(1) if (a == c and b == d) else mpq(0)
    if a == d and b == c:
        if u == 0:
            raise PoleError("R-matrix argument vanishes")
        value += 1 / mpq(u)
    return value


def site(shape: Shape, block: int, k: int) -> int:
    return shape.prefix(block - 1) + k - 1


def block_pair_factors(shape: Shape, point: VarAssignment, k: int, j: int) -> list[RFactor]:
    """Factors of ``R^{[k,j]}(t^k, t^j)``: outer ``i`` ascending, inner ``l`` descending."""
    out = []
    for i in range(1, shape[k] + 1):
        for l in range(shape[j], 0, -1):
            u = point.t(k, i) - point.t(j, l)
            if u == 0:
                raise PoleError(f"t^{k}_{i} - t^{j}_{l} vanishes")
            out.append((site(shape, k, i), site(shape, j, l), u))
    return out


def bethe_r_factors(shape: Shape, point: VarAssignment) -> list[RFactor]:
    """The R-product closing ``T^_xi(t)``: ``i`` from ``n-1`` down, ``j`` from ``i-1`` down."""
    out = []
    for i in range(len(shape.xi), 0, -1):
        for j in range(i - 1, 0, -1):
            out.extend(block_pair_factors(shape, point, i, j))
    return out


def forward_r_factors(shape: Shape, point: VarAssignment, outer, inner) -> list[RFactor]:
    """``prod->_{j in outer} prod->_{i in inner(j)} R^{[j,i]}``."""
    out = []
    for j in outer:
        for i in inner(j):
            out.extend(block_pair_factors(shape, point, j, i))
    return out


def _apply_factor(vec: dict, p: int, q: int, u) -> dict:
    # R^{(pq)}(u) = 1 + P_pq / u is a symmetric matrix, so the same update
    # serves for columns (A x) and rows (x^T A).
    inv = 1 / mpq(u)
    out = defaultdict(mpq)
    for idx, c in vec.items():
        out[idx] += c
        if idx[p] != idx[q]:
            swapped = list(idx)
            swapped[p], swapped[q] = swapped[q], swapped[p]
            out[tuple(swapped)] += c * inv
        else:
            out[idx] += c * inv
    return {k: v for k, v in out.items() if v != 0}


def r_column(factors: Sequence[RFactor], col: Sequence[int]) -> dict:
    """Column ``col`` of the ordered product: ``{row: entry}``."""
    vec = {tuple(col): mpq(1)}
    for p, q, u in reversed(factors):
        vec = _apply_factor(vec, p, q, u)
    return vec


def r_row(factors: Sequence[RFactor], row: Sequence[int]) -> dict:
    """Row ``row`` of the ordered product: ``{col: entry}``."""
    vec = {tuple(row): mpq(1)}
    for p, q, u in factors:
        vec = _apply_factor(vec, p, q, u)
    return vec


def r_block_product(
    shape: Shape, point: VarAssignment, cut: int | None = None, columns=None
) -> dict:
    """The numeric ordered R-product as a sparse map ``(row, col) -> entry``.

    ``cut=None`` gives the full product closing ``T^_xi(t)``.  ``cut=m``
    gives the truncated product ``prod->_{m+1<=j<=n-1} prod->_{m<=i<j}
    R^{[j,i]}``.  ``columns`` restricts which columns are built.
    """
    n = shape.n
    if cut is None:
        factors = bethe_r_factors(shape, point)
    else:
        factors = forward_r_factors(
            shape, point, range(cut + 1, n), lambda j: range(cut, j)
        )
    if columns is None:
        columns = itertools.product(range(1, n + 1), repeat=shape.sites)
    out = {}
    for col in columns:
        for row, value in r_column(factors, col).items():
            out[(row, tuple(col))] = value
    return out


def t_entry_apply(
    module: VermaModule, a: int, b: int, u, x, vec: ModuleVector
) -> ModuleVector:
    """``T^a_b(u) vec = d_ab vec + e_ba vec / (u - x)`` in the evaluation module."""
    if u == x:
        raise PoleError("spectral parameter equals the evaluation point")
    out = module.act(b, a, vec) * ratio(1, u - x)
    if a == b:
        out = out + vec
    return out


def operator_chain_sum(
    module: VermaModule,
    words: dict,
    variables: Sequence,
    x,
    vec: ModuleVector,
    offset: int = 0,
) -> ModuleVector:
    """``sum_w c_w T^{a_1}_{b_1}(s_1) ... T^{a_N}_{b_N}(s_N) vec``.

    ``words`` maps tuples of letter pairs ``((a_1, b_1), ..., (a_N, b_N))`` to
    weights ``c_w``; letters are shifted by ``offset`` before acting.
    Operators act right to left and shared suffixes are evaluated once.
    """
    if not words:
        return ModuleVector()
    N = len(variables)
    level = {(): vec}
    for k in range(N - 1, -1, -1):
        nxt = {}
        for suf in sorted({w[k:] for w in words}):
            a, b = suf[0]
            nxt[suf] = t_entry_apply(
                module, a + offset, b + offset, variables[k], x, level[suf[1:]]
            )
        level = nxt
    total = ModuleVector()
    for w in sorted(words):
        total = total + level[w] * words[w]
    return total


def t_chain_sum(
    module: VermaModule,
    rows: Sequence[int],
    columns: dict,
    variables: Sequence,
    x,
    vec: ModuleVector,
    offset: int = 0,
) -> ModuleVector:
    """``sum_c w_c T^{rows_1}_{c_1}(s_1) ... T^{rows_N}_{c_N}(s_N) vec`` for ``columns = {c: w_c}``."""
    words = {tuple(zip(rows, c)): w for c, w in columns.items()}
    return operator_chain_sum(module, words, variables, x, vec, offset)


def bethe_letters(shape: Shape) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Row ``1^{xi_1} ... (n-1)^{xi_{n-1}}`` and column ``2^{xi_1} ... n^{xi_{n-1}}``."""
    row = tuple(a for a, k in enumerate(shape.xi, start=1) for _ in range(k))
    return row, tuple(a + 1 for a in row)


def apply_bethe(
    module: VermaModule,
    point: VarAssignment,
    vec: ModuleVector,
    offset: int = 0,
) -> ModuleVector:
    """Act with ``B_xi(t)`` of ``Y(gl_r)`` on ``vec``, letters shifted by ``offset``.

    ``point`` supplies the rank-``r`` shape (its blocks) and ``x``; its
    weight is ignored because the action is read off ``module``.
    """
    shape = point.shape
    if shape.sites == 0:
        return vec
    row, col = bethe_letters(shape)
    factors = bethe_r_factors(shape, point)
    column = r_column(factors, col)
    variables = point.variables()
    return t_chain_sum(module, row, column, variables, point.x, vec, offset)


def bethe_direct(
    n: int, shape: Shape, point: VarAssignment, module: VermaModule | None = None
) -> ModuleVector:
    """``B_xi(t) v`` computed from the definition."""
    if shape.n != n or point.shape != shape:
        raise ValueError(f"shape {shape} and point do not describe gl_{n}")
    if module is None:
        module = VermaModule(point.lam)
    return apply_bethe(module, point, ModuleVector.highest())


def rtt_check(
    module: VermaModule, a: int, b: int, c: int, d: int, u, v, x, probe: ModuleVector
) -> bool:
    """``(u-v)[T^a_b(u), T^c_d(v)] = T^a_d(u)T^c_b(v) - T^a_d(v)T^c_b(u)`` on ``probe``."""
    u, v = rational(u), rational(v)
    if u == v:
        raise PoleError("RTT check needs u != v")

    def T(i, j, s, w):
        return t_entry_apply(module, i, j, s, x, w)

    lhs = (T(a, b, u, T(c, d, v, probe)) - T(c, d, v, T(a, b, u, probe))) * (u - v)
    rhs = T(a, d, u, T(c, b, v, probe)) - T(a, d, v, T(c, b, u, probe))
    return lhs == rhs


def _embedded_r(n: int, u, p: int, q: int) -> dict:
    """Sparse ``R^{(pq)}(u)`` on three sites built entry-wise from :func:`r_entry`."""
    out = {}
    for row in itertools.product(range(1, n + 1), repeat=3):
        entries = {}
        a, b = row[p], row[q]
        for c, d in {(a, b), (b, a)}:
            value = r_entry(u, a, b, c, d)
            if value != 0:
                col = list(row)
                col[p], col[q] = c, d
                entries[tuple(col)] = value
        out[row] = entries
    return out


def _matmul(A: dict, B: dict) -> dict:
    out = {}
    for row, entries in A.items():
        acc = defaultdict(mpq)
        for mid, a in entries.items():
            for col, b in B[mid].items():
                acc[col] += a * b
        out[row] = {k: v for k, v in acc.items() if v != 0}
    return out


def yang_baxter_check(n: int, u, v) -> bool:
    """``R12(u-v) R13(u) R23(v) = R23(v) R13(u) R12(u-v)`` entrywise on ``(C^n)^{x3}``."""
    u, v = rational(u), rational(v)
    if u == 0 or v == 0 or u == v:
        raise PoleError("Yang-Baxter check needs u, v, u - v nonzero")
    R12 = _embedded_r(n, u - v, 0, 1)
    R13 = _embedded_r(n, u, 0, 2)
    R23 = _embedded_r(n, v, 1, 2)
    return _matmul(_matmul(R12, R13), R23) == _matmul(_matmul(R23, R13), R12)


def unitarity_check(n: int, u) -> bool:
    """``R(u) R^{(21)}(-u) = (1 - 1/u^2) Id`` on ``C^n (x) C^n``."""
    u = rational(u)
    if u == 0:
        raise PoleError("unitarity check needs u != 0")
    expected = 1 - 1 / (u * u)
    letters = range(1, n + 1)
    for a, b, c, d in itertools.product(letters, repeat=4):
        acc = mpq(0)
        for e, f in itertools.product(letters, repeat=2):
            # R^{(21)}(w)^{ef}_{cd} = R^{fe}_{dc}(w)
            acc += r_entry(u, a, b, e, f) * r_entry(-u, f, e, d, c)
        if acc != (expected if (a, b) == (c, d) else 0):
            return False
    return True
