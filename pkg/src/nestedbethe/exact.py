"""Exact scalars, block symmetrization and pole-safe random points.

Every number in the package is a :class:`gmpy2.mpq`.  Rational function
identities are checked by evaluating both sides at random rational points,
so this module also owns the variable layout (:class:`Shape`,
:class:`VarAssignment`) and the sampler that produces those points.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from gmpy2 import mpq

Rational = mpq

NUMERATOR_RANGE = 10**6
DENOMINATOR_RANGE = 10**3
DEFAULT_RETRIES = 1000


class PoleError(ZeroDivisionError):
    """A rational function was evaluated on one of its poles."""


class ResampleExhausted(RuntimeError):
    """The sampler could not find a point satisfying the predicate."""


def rational(value) -> mpq:
    """Coerce ints, Fractions, mpq and ``"p/q"`` strings to ``mpq``."""
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        return mpq(text)
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; use 'p/q'")
    return mpq(value)


def format_rational(value) -> str:
    value = mpq(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def reciprocal(value, what: str = "denominator") -> mpq:
    if value == 0:
        raise PoleError(f"{what} vanishes")
    return 1 / mpq(value)


def ratio(num, den, what: str = "denominator") -> mpq:
    if den == 0:
        raise PoleError(f"{what} vanishes")
    return mpq(num) / den


@dataclass(frozen=True)
class Shape:
    """Block sizes ``(xi_1, ..., xi_{n-1})`` of the Bethe variables."""

    xi: tuple[int, ...]

    def __post_init__(self):
        xi = tuple(int(k) for k in self.xi)
        if any(k < 0 for k in xi):
            raise ValueError(f"block sizes must be nonnegative, got {xi}")
        object.__setattr__(self, "xi", xi)

    @classmethod
    def parse(cls, text: str) -> "Shape":
        text = text.strip()
        if not text:
            return cls(())
        return cls(tuple(int(part) for part in text.split(",")))

    @property
    def n(self) -> int:
        return len(self.xi) + 1

    @property
    def sites(self) -> int:
        return sum(self.xi)

    def prefix(self, a: int) -> int:
        """``xi^a = xi_1 + ... + xi_a``; ``prefix(0) == 0``."""
        return sum(self.xi[:a])

    def __getitem__(self, a: int) -> int:
        """1-based block size ``xi_a``."""
        if not 1 <= a <= len(self.xi):
            raise IndexError(a)
        return self.xi[a - 1]

    def __str__(self) -> str:
        return ",".join(map(str, self.xi))


@dataclass(frozen=True)
class VarAssignment:
    """Values of all ``t^a_i``, the evaluation point ``x`` and the weight.

    ``blocks[a - 1]`` holds ``(t^a_1, ..., t^a_{xi_a})``.
    """

    blocks: tuple[tuple[mpq, ...], ...]
    x: mpq
    lam: tuple[mpq, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "blocks", tuple(tuple(rational(v) for v in b) for b in self.blocks)
        )
        object.__setattr__(self, "x", rational(self.x))
        object.__setattr__(self, "lam", tuple(rational(v) for v in self.lam))
        if len(self.lam) != len(self.blocks) + 1:
            raise ValueError(
                f"weight has {len(self.lam)} entries, expected {len(self.blocks) + 1}"
            )

    @property
    def shape(self) -> Shape:
        return Shape(tuple(len(b) for b in self.blocks))

    @property
    def n(self) -> int:
        return len(self.lam)

    def block(self, a: int) -> tuple[mpq, ...]:
        return self.blocks[a - 1]

    def t(self, a: int, i: int) -> mpq:
        return self.blocks[a - 1][i - 1]

    def variables(self) -> list[mpq]:
        return [v for b in self.blocks for v in b]

    def with_blocks(self, blocks) -> "VarAssignment":
        return VarAssignment(tuple(blocks), self.x, self.lam)

    def restrict(self, first: int, last: int) -> "VarAssignment":
        """Sub-assignment for the rank ``last - first + 1`` subalgebra on
        indices ``first..last``: blocks ``first..last-1`` and ``lam[first-1:last]``."""
        return VarAssignment(
            self.blocks[first - 1 : last - 1], self.x, self.lam[first - 1 : last]
        )

    def as_dict(self) -> dict:
        return {
            "t": [[format_rational(v) for v in b] for b in self.blocks],
            "x": format_rational(self.x),
            "lambda": [format_rational(v) for v in self.lam],
        }

    def digest(self) -> str:
        text = repr(self.as_dict()).encode()
        return hashlib.sha256(text).hexdigest()[:16]


def generic_point(point: VarAssignment) -> bool:
    """Default denominator-avoidance predicate.

    All spectral parameters and ``x`` must differ pairwise by something
    other than -1, 0 or 1.  That covers every denominator met in the
    package: ``t - x``, ``t_i - t_j`` and the shifted ``t_i - t_j - 1``.
    """
    values = point.variables() + [point.x]
    for a, b in itertools.combinations(values, 2):
        if a - b in (-1, 0, 1):
            return False
    return True


def random_rational(rng: random.Random) -> mpq:
    num = rng.randint(-NUMERATOR_RANGE, NUMERATOR_RANGE)
    den = rng.randint(1, DENOMINATOR_RANGE)
    return mpq(num, den)


def sample_assignment(
    shape: Shape,
    seed,
    predicate: Callable[[VarAssignment], bool] | None = generic_point,
    retries: int = DEFAULT_RETRIES,
    lam: Sequence | None = None,
    x=None,
) -> VarAssignment:
    """Draw a random point for ``shape``, rejecting until ``predicate`` holds.

    ``seed`` may be an int or a string; the draw is deterministic in it.
    ``lam`` and ``x`` pin the weight and evaluation point instead of
    drawing them.  At most ``retries + 1`` points are drawn.
    """
    if lam is not None and len(lam) != shape.n:
        raise ValueError(f"weight needs {shape.n} entries, got {len(lam)}")
    rng = random.Random(seed)
    for _ in range(retries + 1):
        blocks = tuple(tuple(random_rational(rng) for _ in range(k)) for k in shape.xi)
        xv = rational(x) if x is not None else random_rational(rng)
        weight = (
            tuple(rational(v) for v in lam)
            if lam is not None
            else tuple(random_rational(rng) for _ in range(shape.n))
        )
        point = VarAssignment(blocks, xv, weight)
        if predicate is None or predicate(point):
            return point
    raise ResampleExhausted(
        f"no admissible point for shape {shape} after {retries + 1} draws (seed {seed!r})"
    )


def permuted_values(values: Sequence, groups: Sequence[Sequence[int]]):
    """Yield ``(perms, new_values)`` over the product of the groups' symmetric groups.

    ``groups`` lists disjoint position sets of ``values``.
    """
    values = list(values)
    per_group = [list(itertools.permutations(g)) for g in groups]
    for perms in itertools.product(*per_group):
        out = list(values)
        for group, perm in zip(groups, perms):
            for dst, src in zip(group, perm):
                out[dst] = values[src]
        yield perms, out


def symmetrize(f: Callable[[list], object], values: Sequence, groups: Sequence[Sequence[int]]):
    """Blockwise symmetrization ``Sym_{g_1} ... Sym_{g_k} f`` at ``values``.

    ``f`` receives the permuted value list and may return scalars or any
    type supporting ``+``.  Raises :class:`PoleError` naming the
    permutation if an evaluation divides by zero.
    """
    total = None
    for perms, permuted in permuted_values(values, groups):
        try:
            term = f(permuted)
        except ZeroDivisionError as exc:
            raise PoleError(f"pole at permutation {perms}: {exc}") from exc
        total = term if total is None else total + term
    return mpq(0) if total is None else total


def orbit_size(groups: Iterable[Sequence[int]]) -> int:
    return math.prod(math.factorial(len(g)) for g in groups)


def trial_seed(seed: int, *labels) -> str:
    """Deterministic per-trial seed string derived from a base seed."""
    return "/".join([str(seed), *map(str, labels)])
