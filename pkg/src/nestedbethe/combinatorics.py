"""Scalar combinatorics of the splitting formulas.

Conventions: the cut ``m`` separates ``gl_m`` (indices ``1..m``) from
``gl_{n-m}`` (indices ``m+1..n``).  A partition ``I`` is stored as the
tuple ``(I_{m+1}, ..., I_n)`` and ``J`` as ``(J_1, ..., J_m)``; each part is a
sorted tuple of elements of ``{1, ..., M}``.  Empty parts are allowed and
empty products are 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .exact import PoleError, Shape, symmetrize

Partition = tuple  # tuple of sorted tuples


def _part(elements) -> tuple[int, ...]:
    return tuple(sorted(elements))


# -- sequences and partitions ------------------------------------------------


def seq_to_partitions(a: Sequence[int], b: Sequence[int], m: int, n: int):
    """``J_l = {j : a_j = l}`` and ``I_l = {i : b_i = l}``; returns ``(I, J)``."""
    if len(a) != len(b):
        raise ValueError("sequences a and b must have the same length")
    if any(not 1 <= v <= m for v in a):
        raise ValueError(f"entries of a must lie in 1..{m}")
    if any(not m < v <= n for v in b):
        raise ValueError(f"entries of b must lie in {m + 1}..{n}")
    J = tuple(_part(j for j, v in enumerate(a, 1) if v == l) for l in range(1, m + 1))
    I = tuple(_part(i for i, v in enumerate(b, 1) if v == l) for l in range(m + 1, n + 1))
    return I, J


def partitions_to_seqs(I: Partition, J: Partition, m: int):
    """Inverse of :func:`seq_to_partitions`; returns ``(a, b)``."""
    size = sum(len(p) for p in J)
    a = [0] * size
    b = [0] * size
    for l, part in enumerate(J, 1):
        for j in part:
            a[j - 1] = l
    for l, part in enumerate(I, m + 1):
        for i in part:
            b[i - 1] = l
    return tuple(a), tuple(b)


def eta_of_partition(I: Partition, m: int) -> dict[int, int]:
    """``eta_s = |I_{s+1} u ... u I_n|`` for ``s = m+1..n-1``."""
    n = m + len(I)
    return {s: sum(len(I[k - m - 1]) for k in range(s + 1, n + 1)) for s in range(m + 1, n)}


def zeta_of_partition(J: Partition) -> dict[int, int]:
    """``zeta_s = |J_1 u ... u J_s|`` for ``s = 1..m-1``."""
    m = len(J)
    return {s: sum(len(J[k - 1]) for k in range(1, s + 1)) for s in range(1, m)}


def permute_partition(perm, parts: Partition) -> Partition:
    """Image ``sigma(P)`` of every part; ``perm`` maps ``i -> perm[i]`` (1-based dict or callable)."""
    f = perm if callable(perm) else perm.__getitem__
    return tuple(_part(f(i) for i in p) for p in parts)


def transposition(a: int, b: int):
    return lambda i: b if i == a else a if i == b else i


def longest_permutation(M: int):
    return lambda i: M - i + 1


# -- the collections q -------------------------------------------------------


@dataclass(frozen=True)
class QMatrix:
    """Nonnegative integers ``q_sp`` for ``s = m+1..n``, ``p = 1..m``."""

    n: int
    m: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        if len(rows) != self.n - self.m or any(len(r) != self.m for r in rows):
            raise ValueError("q must have n-m rows of m entries")
        if any(v < 0 for r in rows for v in r):
            raise ValueError("q entries must be nonnegative")
        object.__setattr__(self, "rows", rows)

    def __getitem__(self, sp: tuple[int, int]) -> int:
        s, p = sp
        return self.rows[s - self.m - 1][p - 1]

    def cells(self):
        for s in range(self.m + 1, self.n + 1):
            for p in range(1, self.m + 1):
                yield (s, p), self[s, p]

    def as_dict(self) -> dict[tuple[int, int], int]:
        return {sp: k for sp, k in self.cells() if k}

    @property
    def total(self) -> int:
        return sum(map(sum, self.rows))

    @property
    def eta(self) -> dict[int, int]:
        return {
            k: sum(self[s, p] for s in range(k + 1, self.n + 1) for p in range(1, self.m + 1))
            for k in range(self.m + 1, self.n)
        }

    @property
    def zeta(self) -> dict[int, int]:
        return {
            l: sum(self[s, p] for s in range(self.m + 1, self.n + 1) for p in range(1, l + 1))
            for l in range(1, self.m)
        }

    def factorial_product(self) -> int:
        return math.prod(math.factorial(v) for r in self.rows for v in r)

    def __str__(self):
        return " ".join(f"q{s}{p}={k}" for (s, p), k in self.cells())


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def in_Q(q: QMatrix, shape: Shape) -> bool:
    if q.total != shape[q.m]:
        return False
    if any(v > shape[k] for k, v in q.eta.items()):
        return False
    return all(v <= shape[l] for l, v in q.zeta.items())


def enumerate_Q(n: int, m: int, shape: Shape) -> list[QMatrix]:
    """All ``q`` with ``sum q = xi_m``, ``eta_k(q) <= xi_k``, ``zeta_l(q) <= xi_l``.

    Cells are read row-major over ``(s, p)``; the list is in decreasing
    lexicographic order of that cell vector.
    """
    if not 1 <= m < n:
        raise ValueError(f"cut m={m} out of range for n={n}")
    if shape.n != n:
        raise ValueError(f"shape {shape} does not belong to gl_{n}")
    out = []
    for flat in _compositions(shape[m], (n - m) * m):
        q = QMatrix(n, m, tuple(flat[r * m : (r + 1) * m] for r in range(n - m)))
        if in_Q(q, shape):
            out.append(q)
    return out


def _multiset_permutations(labels: list):
    labels = sorted(labels)
    if not labels:
        yield ()
        return
    seen = set()
    for k, lab in enumerate(labels):
        if lab in seen:
            continue
        seen.add(lab)
        for rest in _multiset_permutations(labels[:k] + labels[k + 1 :]):
            yield (lab,) + rest


def _pair_from_cells(q: QMatrix, cells: Sequence[tuple[int, int]]):
    I = tuple(_part(k for k, (s, _) in enumerate(cells, 1) if s == row) for row in range(q.m + 1, q.n + 1))
    J = tuple(_part(k for k, (_, p) in enumerate(cells, 1) if p == col) for col in range(1, q.m + 1))
    return I, J


def enumerate_Sq(q: QMatrix) -> list[tuple[Partition, Partition]]:
    """All ``(I, J)`` with ``|I_s n J_p| = q_sp``."""
    labels = [sp for sp, k in q.cells() for _ in range(k)]
    return [_pair_from_cells(q, cells) for cells in _multiset_permutations(labels)]


def canonical_pair(q: QMatrix, fill: str = "row") -> tuple[Partition, Partition]:
    """A fixed member of ``S_q``: cells filled with consecutive integers.

    ``fill="row"`` visits cells ``(s, p)`` row-major, ``fill="column"``
    column-major.
    """
    if fill == "row":
        order = [sp for sp, _ in q.cells()]
    elif fill == "column":
        order = [(s, p) for p in range(1, q.m + 1) for s in range(q.m + 1, q.n + 1)]
    else:
        raise ValueError(f"unknown fill {fill!r}")
    cells = [sp for sp in order for _ in range(q[sp])]
    return _pair_from_cells(q, cells)


def intersection_counts(I: Partition, J: Partition, m: int) -> dict:
    return {
        (s, p): len(set(I[s - m - 1]) & set(J[p - 1]))
        for s in range(m + 1, m + len(I) + 1)
        for p in range(1, len(J) + 1)
    }


# -- rational functions ------------------------------------------------------


def _merged(parts: Sequence[Sequence[int]]) -> list[int]:
    return sorted(itertools.chain.from_iterable(parts))


def _frac(num, den, where):
    if den == 0:
        raise PoleError(where)
    return mpq(num) / den


def U(I: Partition, layers: Sequence[Sequence], base: Sequence) -> mpq:
    """``U_I(v; v^m)``.

    ``layers[h - 1]`` is ``v^{m+h}`` (length ``mu^{m+h}``) for
    ``h = 1..n-m-1`` and ``base`` is ``v^m`` (length ``M``).
    """
    r = len(I)
    if len(layers) != r - 1:
        raise ValueError(f"U needs {r - 1} layers, got {len(layers)}")
    merged = [_merged(I[h:]) for h in range(r)]
    if len(base) != len(merged[0]):
        raise ValueError("base layer length differs from the partitioned set")
    value = mpq(1)
    prev_vals, prev_idx = base, merged[0]
    for h in range(1, r):
        cur_vals, cur_idx = layers[h - 1], merged[h]
        if len(cur_vals) != len(cur_idx):
            raise ValueError(f"layer {h} has {len(cur_vals)} values, expected {len(cur_idx)}")
        for a, (ia, va) in enumerate(zip(cur_idx, cur_vals)):
            for ic, vc in zip(prev_idx, prev_vals):
                if ic == ia:
                    value *= _frac(1, va - vc, f"U layer {h}: v_{a + 1} - v'_c")
                elif ic > ia:
                    value *= _frac(va - vc + 1, va - vc, f"U layer {h}: v_{a + 1} - v'_c")
            for vb in cur_vals[a + 1 :]:
                value *= _frac(vb - va + 1, vb - va, f"U layer {h}: same-layer pair")
        prev_vals, prev_idx = cur_vals, cur_idx
    return value


def U_tilde(J: Partition, layers: Sequence[Sequence], top: Sequence) -> mpq:
    """``U~_J(u; u^m)``.

    ``layers[l - 1]`` is ``u^l`` (length ``lambda^l``) for ``l = 1..m-1``
    and ``top`` is ``u^m`` (length ``M``).  The same-layer factors run over
    ``u^1, ..., u^{m-1}`` and skip ``u^m``, mirroring :func:`U`; this is the
    version satisfying the exchange relations (see
    :func:`U_tilde_as_printed` for the other reading).
    """
    all_layers, merged = _tilde_layers(J, layers, top)
    m = len(J)
    value = _tilde_cross(all_layers, merged, m)
    for l in range(1, m):
        value *= _tilde_same(all_layers[l - 1], l)
    return value


def U_tilde_as_printed(J: Partition, layers: Sequence[Sequence], top: Sequence) -> mpq:
    """``U~_J`` with same-layer factors on ``u^2, ..., u^m`` (kept for comparison only)."""
    all_layers, merged = _tilde_layers(J, layers, top)
    m = len(J)
    value = _tilde_cross(all_layers, merged, m)
    for l in range(2, m + 1):
        value *= _tilde_same(all_layers[l - 1], l)
    return value


def _tilde_layers(J, layers, top):
    m = len(J)
    if len(layers) != m - 1:
        raise ValueError(f"U_tilde needs {m - 1} layers, got {len(layers)}")
    merged = [None] + [_merged(J[:l]) for l in range(1, m + 1)]
    if len(top) != len(merged[m]):
        raise ValueError("top layer length differs from the partitioned set")
    all_layers = list(layers) + [top]
    for l in range(1, m):
        if len(all_layers[l - 1]) != len(merged[l]):
            raise ValueError(f"layer {l} has wrong length")
    return all_layers, merged


def _tilde_cross(all_layers, merged, m):
    value = mpq(1)
    for l in range(2, m + 1):
        cur_vals, cur_idx = all_layers[l - 1], merged[l]
        prev_vals, prev_idx = all_layers[l - 2], merged[l - 1]
        for a, (ja, ua) in enumerate(zip(cur_idx, cur_vals)):
            for jc, uc in zip(prev_idx, prev_vals):
                if jc < ja:
                    value *= _frac(ua - uc + 1, ua - uc, f"U~ layer {l}: u_{a + 1} - u'_c")
                elif jc == ja:
                    value *= _frac(1, ua - uc, f"U~ layer {l}: u_{a + 1} - u'_c")
    return value


def _tilde_same(vals, l):
    value = mpq(1)
    for ua, ub in itertools.combinations(vals, 2):
        value *= _frac(ua - ub + 1, ua - ub, f"U~ layer {l}: same-layer pair")
    return value


def _layer_groups(layers):
    groups, flat, start = [], [], 0
    for layer in layers:
        groups.append(list(range(start, start + len(layer))))
        flat.extend(layer)
        start += len(layer)
    return flat, groups


def _split(flat, layers):
    out, start = [], 0
    for layer in layers:
        out.append(flat[start : start + len(layer)])
        start += len(layer)
    return out


def W(I: Partition, layers: Sequence[Sequence], base: Sequence) -> mpq:
    """``W_I``: ``U_I`` symmetrized within every layer ``v^{m+1}, ..., v^{n-1}``."""
    flat, groups = _layer_groups(layers)
    return symmetrize(lambda vals: U(I, _split(vals, layers), base), flat, groups)


def W_tilde(J: Partition, layers: Sequence[Sequence], top: Sequence) -> mpq:
    """``W~_J``: ``U~_J`` symmetrized within every layer ``u^1, ..., u^{m-1}``."""
    flat, groups = _layer_groups(layers)
    return symmetrize(lambda vals: U_tilde(J, _split(vals, layers), top), flat, groups)


def phi(z: Sequence) -> mpq:
    """``Phi(z) = prod_{a<b} (z_a - z_b - 1) / (z_a - z_b)``."""
    value = mpq(1)
    for za, zb in itertools.combinations(z, 2):
        value *= _frac(za - zb - 1, za - zb, "Phi: z_a - z_b")
    return value


# -- scalar parts of the sub-Bethe factors -----------------------------------


def L_prefactor(
    m: int, eta: dict, blocks: Sequence[Sequence], x, lam: Sequence, same_block: bool = True
) -> mpq:
    """Scalar part of ``L_{eta, xi''}``.

    ``blocks[a - 1]`` is ``t^a`` for the full ``gl_n`` point; only blocks
    ``m+1..n-1`` are read.  ``lam`` is the full weight.  ``same_block``
    includes the factor coupling the first ``eta_l`` variables of block
    ``l`` to the rest of it; without it the sub-Bethe identity fails as
    soon as a block holds both kinds of variables.
    """
    n = len(blocks) + 1
    value = mpq(1)
    for a in range(m + 1, n - 1):
        upper, lower = blocks[a], blocks[a - 1]
        for i in range(eta[a + 1]):
            for j in range(eta[a], len(lower)):
                d = upper[i] - lower[j]
                value *= _frac(d + 1, d, f"L: t^{a + 1}_{i + 1} - t^{a}_{j + 1}")
    for l in range(m + 1, n):
        block = blocks[l - 1]
        for i in range(eta[l]):
            t = block[i]
            value *= _frac(t - x + lam[l - 1], t - x, f"L: t^{l}_{i + 1} - x")
        if same_block:
            value *= _head_tail(block, eta[l], f"L: block {l}")
    return value


def L_tilde_prefactor(
    m: int, zeta: dict, blocks: Sequence[Sequence], x, lam: Sequence, same_block: bool = True
) -> mpq:
    """Scalar part of ``L~_{zeta, xi'}``; reads blocks ``1..m-1`` only.

    ``same_block`` plays the same role as in :func:`L_prefactor`, pairing
    the first ``xi_l - zeta_l`` variables of block ``l`` with the last
    ``zeta_l``.
    """
    value = mpq(1)
    for a in range(1, m - 1):
        upper, lower = blocks[a], blocks[a - 1]
        for i in range(len(upper) - zeta[a + 1]):
            for j in range(len(lower) - zeta[a], len(lower)):
                d = upper[i] - lower[j]
                value *= _frac(d + 1, d, f"L~: t^{a + 1}_{i + 1} - t^{a}_{j + 1}")
    for l in range(1, m):
        block = blocks[l - 1]
        for i in range(zeta[l]):
            t = block[len(block) - 1 - i]
            value *= _frac(t - x + lam[l], t - x, f"L~: t^{l}_{len(block) - i} - x")
        if same_block:
            value *= _head_tail(block, len(block) - zeta[l], f"L~: block {l}")
    return value


def _head_tail(block, cut, where) -> mpq:
    """``prod_{i <= cut < j} (t_j - t_i + 1) / (t_j - t_i)`` within one block."""
    value = mpq(1)
    for ti in block[:cut]:
        for tj in block[cut:]:
            value *= _frac(tj - ti + 1, tj - ti, where)
    return value


# -- variable slices ---------------------------------------------------------


@dataclass(frozen=True)
class SplitVars:
    """Slices of a point around the cut ``m`` for given ``eta``/``zeta``.

    ``ddot_head[k]``/``ddot_tail[k]`` split block ``m+1+k`` at ``eta``;
    ``dot_head[k]``/``dot_tail[k]`` split block ``1+k`` at ``xi - zeta``.
    """

    t_m: tuple
    t_m_reversed: tuple
    dot_head: tuple
    dot_tail: tuple
    ddot_head: tuple
    ddot_tail: tuple


def split_vars(blocks: Sequence[Sequence], m: int, eta: dict, zeta: dict) -> SplitVars:
    n = len(blocks) + 1
    t_m = tuple(blocks[m - 1])
    dot_head, dot_tail = [], []
    for l in range(1, m):
        block = tuple(blocks[l - 1])
        cut = len(block) - zeta[l]
        if cut < 0:
            raise ValueError(f"zeta_{l} exceeds xi_{l}")
        dot_head.append(block[:cut])
        dot_tail.append(block[cut:])
    ddot_head, ddot_tail = [], []
    for l in range(m + 1, n):
        block = tuple(blocks[l - 1])
        if eta[l] > len(block):
            raise ValueError(f"eta_{l} exceeds xi_{l}")
        ddot_head.append(block[: eta[l]])
        ddot_tail.append(block[eta[l] :])
    return SplitVars(
        t_m, t_m[::-1], tuple(dot_head), tuple(dot_tail), tuple(ddot_head), tuple(ddot_tail)
    )
