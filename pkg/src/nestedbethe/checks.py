"""Named identity checks run over seeded random points.

Each check maps a :class:`CheckSpec` to a list of trial records.  A trial
draws one pole-free point from a seed string derived from the spec, runs
every comparison the check owns at that point and records the first
difference it finds.  Nothing time-dependent enters a report, so equal
specs give byte-identical output.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import asdict, dataclass
from typing import Callable

from gmpy2 import mpq

from . import combinatorics as comb
from .exact import (
    PoleError,
    ResampleExhausted,
    Shape,
    VarAssignment,
    format_rational,
    random_rational,
    rational,
    sample_assignment,
    symmetrize,
    trial_seed,
)
from .nested import mainth_rhs, splitting_rhs, uprop_rhs, xi_m_zero_rhs
from .verma import ModuleVector, VermaModule, monomial_str
from .yangian import bethe_direct, rtt_check, unitarity_check, yang_baxter_check

DEFAULT_TRIALS = 10
DEFAULT_BUDGET = 10**6


class InvalidConfig(ValueError):
    """A check was requested with parameters it cannot run on."""


class BudgetExceeded(RuntimeError):
    """The estimated work for a check is above the configured cap."""

    def __init__(self, estimate: int, budget: int):
        super().__init__(f"estimated orbit size {estimate} exceeds budget {budget}")
        self.estimate = estimate
        self.budget = budget


@dataclass(frozen=True)
class CheckSpec:
    name: str
    n: int
    xi: tuple[int, ...] = ()
    m: int | None = None
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    lam: tuple[str, ...] | None = None
    x: str | None = None
    budget: int = DEFAULT_BUDGET
    inject_fault: bool = False

    def as_dict(self) -> dict:
        out = asdict(self)
        out["check"] = out.pop("name")
        out["xi"] = list(self.xi)
        out["lambda"] = list(self.lam) if self.lam is not None else None
        del out["lam"]
        out["lambda_mode"] = "explicit" if self.lam is not None else "random"
        return out


class Mismatch(Exception):
    """Raised inside a trial with the data of the first difference."""

    def __init__(self, record: dict):
        super().__init__(record.get("what", "mismatch"))
        self.record = record


# -- comparison helpers -------------------------------------------------------


def _flip(value, spec: CheckSpec):
    """The fault-injection hook: a wrong overall sign on the right-hand side."""
    return -value if spec.inject_fault else value


def compare_vectors(what: str, expected: ModuleVector, actual: ModuleVector) -> None:
    if expected == actual:
        return
    for mono in sorted(set(expected.terms) | set(actual.terms)):
        a, b = expected.coefficient(mono), actual.coefficient(mono)
        if a != b:
            raise Mismatch(
                {
                    "what": what,
                    "monomial": monomial_str(mono),
                    "expected": format_rational(a),
                    "actual": format_rational(b),
                }
            )


def compare_scalars(what: str, lhs, rhs) -> None:
    if lhs != rhs:
        raise Mismatch({"what": what, "lhs": format_rational(lhs), "rhs": format_rational(rhs)})


def require(what: str, condition: bool) -> None:
    if not condition:
        raise Mismatch({"what": what})


# -- per-check trial bodies ---------------------------------------------------


def _cuts(spec: CheckSpec, shape: Shape) -> list[int]:
    return [spec.m] if spec.m is not None else list(range(1, shape.n))


def _draw_distinct(rng: random.Random, k: int) -> list[mpq]:
    """``k`` rationals with pairwise differences outside {-1, 0, 1} and nonzero values."""
    while True:
        vals = [random_rational(rng) for _ in range(k)]
        if all(v != 0 for v in vals) and all(
            a - b not in (-1, 0, 1) for a, b in itertools.combinations(vals, 2)
        ):
            return vals


def _yang_baxter(spec, shape, point, rng):
    u, v = _draw_distinct(rng, 2)
    ok = yang_baxter_check(spec.n, u, v)
    require(f"Yang-Baxter at u={format_rational(u)}, v={format_rational(v)}", ok != spec.inject_fault)
    require(f"unitarity at u={format_rational(u)}", unitarity_check(spec.n, u))


def _random_probe(module: VermaModule, rng: random.Random) -> ModuleVector:
    """A small random vector: ``v`` plus a few low-degree monomials."""
    probe = ModuleVector.highest()
    pairs = list(module.order)
    for _ in range(2):
        i, j = rng.choice(pairs)
        probe = probe + module.act(i, j, ModuleVector.highest()) * random_rational(rng)
    return probe


def _rtt(spec, shape, point, rng):
    module = VermaModule(point.lam)
    u, v = _draw_distinct(rng, 2)
    while point.x - u in (-1, 0, 1) or point.x - v in (-1, 0, 1):
        u, v = _draw_distinct(rng, 2)
    probe = _random_probe(module, rng)
    letters = range(1, spec.n + 1)
    for a, b, c, d in itertools.product(letters, repeat=4):
        ok = rtt_check(module, a, b, c, d, u, v, point.x, probe)
        if spec.inject_fault and (a, b, c, d) == (1, 2, 2, 1):
            ok = not ok
        require(f"RTT relation for (a,b,c,d)=({a},{b},{c},{d})", ok)


def _exchange(spec, shape, point, rng):
    for m in _cuts(spec, shape):
        M = shape[m]
        z = list(point.block(m))
        for q in comb.enumerate_Q(spec.n, m, shape):
            sv = comb.split_vars(point.blocks, m, q.eta, q.zeta)
            for I, J in comb.enumerate_Sq(q):
                for a in range(1, M):
                    s = comb.transposition(a, a + 1)
                    zs = list(z)
                    zs[a - 1], zs[a] = zs[a], zs[a - 1]
                    d = z[a] - z[a - 1]
                    lhs = comb.W(I, sv.ddot_head, zs)
                    rhs = d / (d - 1) * comb.W(comb.permute_partition(s, I), sv.ddot_head, z) - comb.W(
                        I, sv.ddot_head, z
                    ) / (d - 1)
                    compare_scalars(f"W exchange m={m} a={a} I={I}", lhs, _flip(rhs, spec))
                    d = z[a - 1] - z[a]
                    lhs = comb.W_tilde(J, sv.dot_tail, zs)
                    rhs = d / (d - 1) * comb.W_tilde(
                        comb.permute_partition(s, J), sv.dot_tail, z
                    ) - comb.W_tilde(J, sv.dot_tail, z) / (d - 1)
                    compare_scalars(f"W~ exchange m={m} a={a} J={J}", lhs, _flip(rhs, spec))


def _random_rational_function(rng: random.Random, k: int) -> Callable[[list], mpq]:
    """A random rational function of ``k`` arguments with no symmetry."""
    coeffs = [[random_rational(rng) for _ in range(k)] for _ in range(3)]
    shifts = [random_rational(rng) for _ in range(k)]

    def f(xs):
        num = sum(c * x ** (p + 1) for p, row in enumerate(coeffs) for c, x in zip(row, xs))
        den = 1
        for i, (s, x) in enumerate(zip(shifts, xs)):
            den *= x - s * (i + 1)
        return num / den if den != 0 else mpq(0)

    return f


def _random_block_symmetric(rng: random.Random, k: int) -> Callable[[list], mpq]:
    """Random function symmetric in ``x[:k]`` and in ``x[k:]``."""
    a, b, c = (random_rational(rng) for _ in range(3))

    def g(xs):
        head, tail = xs[:k], xs[k:]
        e1h, e1t = sum(head, mpq(0)), sum(tail, mpq(0))
        p2h = sum((x * x for x in head), mpq(0))
        p2t = sum((x * x for x in tail), mpq(0))
        den = c + e1h * e1t
        return a * p2h + b * e1h * p2t + (1 / den if den != 0 else 0) + math.prod(head, start=mpq(1))

    return g


def sym_factorization_sides(F, G, xs, k):
    """Both sides of ``Sym_l[F G] = 1/k! Sym_l[(Sym_k F) G]``, ``F`` reading ``x[:k]``."""
    l = len(xs)
    full = [list(range(l))]
    lhs = symmetrize(lambda v: F(v[:k]) * G(v), xs, full)

    def inner(v):
        return symmetrize(lambda w: F(w[:k]), v, [list(range(k))])

    rhs = symmetrize(lambda v: inner(v) * G(v), xs, full) / math.factorial(k)
    return lhs, rhs


def _sym_factorization(spec, shape, point, rng):
    for l in range(1, 4):
        for k in range(1, l + 1):
            xs = _draw_distinct(rng, l)
            F = _random_rational_function(rng, k)
            G = _random_block_symmetric(rng, k)
            lhs, rhs = sym_factorization_sides(F, G, xs, k)
            compare_scalars(f"Sym factorization k={k} l={l}", lhs, _flip(rhs, spec))


def _placeholder(rng, sizes):
    """Per-block functions symmetric in a head and in a tail of given cuts."""
    coeffs = [(random_rational(rng), random_rational(rng)) for _ in sizes]

    def value(blocks):
        out = mpq(1)
        for (a, b), block, cut in zip(coeffs, blocks, sizes):
            head, tail = block[:cut], block[cut:]
            out *= a + sum(head, mpq(0)) ** 2 + b * sum((x * x for x in tail), mpq(0))
        return out

    return value


def _ulem(spec, shape, point, rng):
    n, x, lam = spec.n, point.x, point.lam
    for m in _cuts(spec, shape):
        t_m = point.block(m)
        for q in comb.enumerate_Q(n, m, shape):
            eta, zeta = q.eta, q.zeta
            I, J = comb.canonical_pair(q)
            ddot = list(range(m + 1, n))
            extra = _placeholder(rng, [eta[b] for b in ddot])

            def psi_side(use_w, blocks):
                sv = comb.split_vars(blocks, m, eta, zeta)
                f = comb.W if use_w else comb.U
                pre = comb.L_prefactor(m, eta, blocks, x, lam)
                return f(I, sv.ddot_head, t_m) * pre * extra([blocks[b - 1] for b in ddot])

            lhs = _sym_blocks(point, ddot, lambda b: psi_side(False, b))
            rhs = _sym_blocks(point, ddot, lambda b: psi_side(True, b))
            rhs /= math.prod(math.factorial(eta[b]) for b in ddot)
            compare_scalars(f"U to W rescaling (psi side) m={m} q=[{q}]", lhs, _flip(rhs, spec))

            dot = list(range(1, m))
            extra_t = _placeholder(rng, [shape[a] - zeta[a] for a in dot])

            def phi_side(use_w, blocks):
                sv = comb.split_vars(blocks, m, eta, zeta)
                f = comb.W_tilde if use_w else comb.U_tilde
                pre = comb.L_tilde_prefactor(m, zeta, blocks, x, lam)
                return f(J, sv.dot_tail, t_m[::-1]) * pre * extra_t([blocks[a - 1] for a in dot])

            lhs = _sym_blocks(point, dot, lambda b: phi_side(False, b))
            rhs = _sym_blocks(point, dot, lambda b: phi_side(True, b))
            rhs /= math.prod(math.factorial(zeta[a]) for a in dot)
            compare_scalars(f"U~ to W~ rescaling (phi side) m={m} q=[{q}]", lhs, _flip(rhs, spec))


def _sym_blocks(point: VarAssignment, which, f) -> mpq:
    """``Sym`` over every block listed in ``which`` of a scalar function of all blocks."""
    total = mpq(0)
    blocks = list(point.blocks)
    choices = [list(itertools.permutations(blocks[a - 1])) for a in which]
    for combo in itertools.product(*choices):
        out = list(blocks)
        for a, perm in zip(which, combo):
            out[a - 1] = perm
        try:
            total += f(tuple(out))
        except ZeroDivisionError as exc:
            raise PoleError(f"pole while symmetrizing: {exc}") from exc
    return total


def wstat_sides(I, J, ddot_head, dot_tail, z):
    """Both sides of the permutation-sum identity for ``W``, ``W~`` and ``Phi``."""
    M = len(z)
    lhs = mpq(0)
    for perm in itertools.permutations(range(1, M + 1)):
        sigma = perm.__getitem__

        def f(i, sigma=sigma):
            return sigma(i - 1)

        lhs += comb.W(comb.permute_partition(f, I), ddot_head, z) * comb.W_tilde(
            comb.permute_partition(f, J), dot_tail, z
        )
    I_rev = comb.permute_partition(comb.longest_permutation(M), I)
    rhs = symmetrize(
        lambda zz: comb.W(I_rev, ddot_head, zz) * comb.W_tilde(J, dot_tail, zz[::-1]) * comb.phi(zz),
        list(z),
        [list(range(M))],
    )
    return lhs, rhs


def _wstat(spec, shape, point, rng):
    for m in _cuts(spec, shape):
        for q in comb.enumerate_Q(spec.n, m, shape):
            sv = comb.split_vars(point.blocks, m, q.eta, q.zeta)
            for fill in ("row", "column"):
                I, J = comb.canonical_pair(q, fill)
                lhs, rhs = wstat_sides(I, J, sv.ddot_head, sv.dot_tail, point.block(m))
                compare_scalars(f"permutation-sum identity m={m} q=[{q}] fill={fill}", lhs, _flip(rhs, spec))


def _vector_against_direct(rhs_fn, label):
    def run(spec, shape, point, rng):
        module = VermaModule(point.lam)
        direct = bethe_direct(spec.n, shape, point, module)
        for m in _cuts(spec, shape):
            value = rhs_fn(spec.n, m, shape, point, module=module)
            compare_vectors(f"{label} m={m}", direct, _flip(value, spec))

    return run


def _m_independence(spec, shape, point, rng):
    module = VermaModule(point.lam)
    values = [(m, mainth_rhs(spec.n, m, shape, point, module=module)) for m in range(1, spec.n)]
    if not values:
        return
    m0, ref = values[0]
    for m, value in values[1:]:
        compare_vectors(f"main formula m={m0} vs m={m}", ref, _flip(value, spec))


def _xi_m_zero(spec, shape, point, rng):
    module = VermaModule(point.lam)
    direct = bethe_direct(spec.n, shape, point, module)
    for m in _zero_cuts(spec, shape):
        reduced = xi_m_zero_rhs(spec.n, m, shape, point, module=module)
        compare_vectors(f"xi_{m}=0 reduction vs main formula", mainth_rhs(spec.n, m, shape, point, module=module), _flip(reduced, spec))
        compare_vectors(f"xi_{m}=0 reduction vs direct", direct, _flip(reduced, spec))


def _zero_cuts(spec, shape):
    return [m for m in _cuts(spec, shape) if shape[m] == 0]


def _order_probe(spec, shape, point, rng):
    module = VermaModule(point.lam)
    for m in _cuts(spec, shape):
        a = mainth_rhs(spec.n, m, shape, point, module=module, order="phi-psi")
        b = mainth_rhs(spec.n, m, shape, point, module=module, order="psi-phi")
        compare_vectors(f"sub-Bethe operator order m={m}", a, _flip(b, spec))


def expected_weight(lam, shape: Shape) -> tuple:
    xi = (0,) + tuple(shape.xi) + (0,)
    return tuple(l - xi[a] + xi[a - 1] for a, l in enumerate(lam, 1))


def _weight_invariant(spec, shape, point, rng):
    module = VermaModule(point.lam)
    direct = bethe_direct(spec.n, shape, point, module)
    want = expected_weight(point.lam, shape)
    if direct:
        got = module.weight_of(direct)
        if spec.inject_fault:
            got = tuple(-w for w in got)
        require(
            f"weight {[format_rational(w) for w in got]} != {[format_rational(w) for w in want]}",
            got == want,
        )
    for m in _cuts(spec, shape):
        value = mainth_rhs(spec.n, m, shape, point, module=module)
        if value:
            require(f"main formula weight m={m}", module.weight_of(value) == want)


def _block_symmetry(spec, shape, point, rng):
    module = VermaModule(point.lam)
    direct = bethe_direct(spec.n, shape, point, module)
    for a in range(1, spec.n):
        block = list(point.block(a))
        if len(block) < 2:
            continue
        perm = list(block)
        while perm == block:
            rng.shuffle(perm)
        blocks = list(point.blocks)
        blocks[a - 1] = tuple(perm)
        moved = bethe_direct(spec.n, shape, point.with_blocks(blocks), module)
        compare_vectors(f"permuting block t^{a}", direct, _flip(moved, spec))


@dataclass(frozen=True)
class CheckDef:
    run: Callable
    needs_shape: bool = True
    uses_m: bool = True
    needs_point: bool = True


CHECKS: dict[str, CheckDef] = {
    "yang-baxter": CheckDef(_yang_baxter, needs_shape=False, uses_m=False, needs_point=False),
    "rtt": CheckDef(_rtt, needs_shape=False, uses_m=False),
    "exchange-wcor": CheckDef(_exchange),
    "sym-factorization": CheckDef(_sym_factorization, needs_shape=False, uses_m=False, needs_point=False),
    "ulem": CheckDef(_ulem),
    "wstat": CheckDef(_wstat),
    "splitting": CheckDef(_vector_against_direct(splitting_rhs, "splitting formula")),
    "uprop": CheckDef(_vector_against_direct(uprop_rhs, "intermediate formula")),
    "mainth": CheckDef(_vector_against_direct(mainth_rhs, "main formula")),
    "m-independence": CheckDef(_m_independence, uses_m=False),
    "xi-m-zero": CheckDef(_xi_m_zero),
    "order-probe": CheckDef(_order_probe),
    "weight-invariant": CheckDef(_weight_invariant),
    "block-symmetry": CheckDef(_block_symmetry, uses_m=False),
}

CHECK_NAMES = tuple(CHECKS)


# -- validation and budget ----------------------------------------------------


def validate(spec: CheckSpec) -> Shape:
    if spec.name not in CHECKS:
        raise InvalidConfig(f"unknown check {spec.name!r}; choose from {', '.join(CHECK_NAMES)}")
    if not isinstance(spec.n, int) or spec.n < 1:
        raise InvalidConfig(f"n must be a positive integer, got {spec.n!r}")
    definition = CHECKS[spec.name]
    xi = tuple(spec.xi)
    if not xi and not definition.needs_shape:
        xi = (0,) * (spec.n - 1)
    if len(xi) != spec.n - 1:
        raise InvalidConfig(f"xi has {len(xi)} entries; gl_{spec.n} needs {spec.n - 1}")
    try:
        shape = Shape(xi)
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from exc
    if spec.m is not None:
        if not definition.uses_m:
            raise InvalidConfig(f"check {spec.name} does not take m")
        if not 1 <= spec.m < spec.n:
            raise InvalidConfig(f"m={spec.m} out of range 1..{spec.n - 1}")
    if definition.uses_m and definition.needs_shape and spec.n < 2:
        raise InvalidConfig(f"check {spec.name} needs n >= 2")
    if spec.name == "xi-m-zero" and not _zero_cuts(spec, shape):
        raise InvalidConfig("xi-m-zero needs a cut m with xi_m = 0")
    if spec.trials < 0:
        raise InvalidConfig("trials must be nonnegative")
    if spec.budget < 1:
        raise InvalidConfig("budget must be positive")
    if spec.lam is not None and len(spec.lam) != spec.n:
        raise InvalidConfig(f"lambda needs {spec.n} entries, got {len(spec.lam)}")
    try:
        if spec.lam is not None:
            [rational(v) for v in spec.lam]
        if spec.x is not None:
            rational(spec.x)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InvalidConfig(f"bad rational: {exc}") from exc
    return shape


def estimate_cost(spec: CheckSpec, shape: Shape) -> int:
    """``prod xi_a! * |Q_{m,n}| * (column multiset orbit)``, maximized over the cuts used."""
    definition = CHECKS[spec.name]
    if spec.name == "rtt":
        return spec.n**4
    if spec.name in ("yang-baxter", "sym-factorization"):
        return spec.n**3
    block = math.prod(math.factorial(k) for k in shape.xi)
    orbit = math.factorial(shape.sites) // block
    cuts = _cuts(spec, shape) if definition.uses_m else list(range(1, shape.n))
    q_count = max((len(comb.enumerate_Q(spec.n, m, shape)) for m in cuts), default=1)
    return block * max(q_count, 1) * orbit


# -- running ------------------------------------------------------------------


def _point_for(spec: CheckSpec, shape: Shape, seed: str) -> VarAssignment:
    return sample_assignment(shape, seed, lam=spec.lam, x=spec.x)


def run_trial(spec: CheckSpec, shape: Shape, index: int) -> dict:
    seed = trial_seed(spec.seed, spec.name, spec.n, spec.m if spec.m is not None else "all", shape, index)
    record = {"index": index, "seed": seed}
    definition = CHECKS[spec.name]
    point = _point_for(spec, shape, seed)
    record["point"] = point.digest()
    rng = random.Random(seed + "/aux")
    try:
        definition.run(spec, shape, point, rng)
    except Mismatch as exc:
        record["passed"] = False
        record["failure"] = dict(exc.record, values=point.as_dict())
    except PoleError as exc:
        record["passed"] = False
        record["failure"] = {"what": f"pole: {exc}", "values": point.as_dict()}
    else:
        record["passed"] = True
    return record


def run_check(spec: CheckSpec) -> dict:
    """Run ``spec.trials`` trials; raises :class:`InvalidConfig` or :class:`BudgetExceeded`."""
    shape = validate(spec)
    estimate = estimate_cost(spec, shape)
    if estimate > spec.budget:
        raise BudgetExceeded(estimate, spec.budget)
    trials = []
    for index in range(spec.trials):
        try:
            trials.append(run_trial(spec, shape, index))
        except ResampleExhausted as exc:
            raise InvalidConfig(str(exc)) from exc
    config = spec.as_dict()
    config["xi"] = list(shape.xi)
    return {"config": config, "trials": trials, "summary": summarize(trials, estimate)}


def summarize(trials: list[dict], estimate: int | None = None) -> dict:
    passed = sum(1 for t in trials if t["passed"])
    out = {"trials": len(trials), "passed": passed, "failed": len(trials) - passed}
    if estimate is not None:
        out["estimated_cost"] = estimate
    return out
