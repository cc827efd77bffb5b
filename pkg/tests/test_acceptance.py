"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

All comparisons are exact equalities over rationals.  Grids are driven
through the same harness the CLI uses, so a failure here is reproducible
with ``nestedbethe verify`` and the reported seed.
"""

import itertools
import math
import time
from pathlib import Path

from nestedbethe import combinatorics as comb
from nestedbethe.checks import CheckSpec, run_check
from nestedbethe.cli import main, shapes_up_to
from nestedbethe.exact import Shape, sample_assignment, symmetrize
from nestedbethe.nested import mainth_rhs
from nestedbethe.verma import VermaModule
from nestedbethe.yangian import bethe_direct

RESULTS = []
SEEDS = (1, 2, 3)
SWEEP = Path(__file__).resolve().parent.parent / "configs" / "acceptance.json"


def report(number, title, ok, detail=""):
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    print(line)
    RESULTS.append(line)
    assert ok, line


def run_grid(cases):
    """Run ``CheckSpec`` kwargs in order; return trial count and the first failing trial."""
    count, first = 0, None
    for kwargs in cases:
        out = run_check(CheckSpec(**kwargs))
        count += out["summary"]["trials"]
        if out["summary"]["failed"] and first is None:
            bad = next(t for t in out["trials"] if not t["passed"])
            first = f"{kwargs['name']} n={kwargs['n']} xi={kwargs.get('xi')} seed {bad['seed']}"
    return count, first


def timed(cases):
    start = time.perf_counter()
    count, first = run_grid(cases)
    return count, first, time.perf_counter() - start


def shape_grid(names, ns, max_sites, trials, seeds=SEEDS, keep=lambda xi: True):
    # m=None runs every valid cut inside each trial
    for name, n, seed in itertools.product(names, ns, seeds):
        for xi in shapes_up_to(n, max_sites):
            if keep(xi):
                yield dict(name=name, n=n, xi=xi, m=None, trials=trials, seed=seed)


def test_criterion_01_yang_baxter():
    cases = [dict(name="yang-baxter", n=n, trials=10, seed=1) for n in (2, 3, 4)]
    count, first, secs = timed(cases)
    report(1, "Yang-Baxter n=2,3,4", first is None and secs < 1, f"{count} points, {secs:.2f}s {first or ''}".strip())


def test_criterion_02_rtt():
    cases = [dict(name="rtt", n=n, trials=5, seed=1) for n in (2, 3, 4)]
    count, first, secs = timed(cases)
    report(2, "RTT all quadruples n<=4", first is None and secs < 10, f"{count} points, {secs:.2f}s {first or ''}".strip())


def test_criterion_03_splitting():
    count, first, secs = timed(shape_grid(["splitting"], (3, 4), 4, 10))
    report(3, "splitting formula vs direct", first is None and secs < 120, f"{count} trials, {secs:.1f}s {first or ''}".strip())


def test_criterion_04_intermediate_formula():
    count, first, secs = timed(shape_grid(["uprop"], (3, 4), 4, 10))
    report(4, "intermediate formula vs direct", first is None, f"{count} trials, {secs:.1f}s {first or ''}".strip())


def _mainth_cases(trials, seeds):
    for n, seed in itertools.product((2, 3, 4), seeds):
        for xi in shapes_up_to(n, 5):
            for m in range(1, n):
                if xi[m - 1] <= 3:
                    yield dict(name="mainth", n=n, xi=xi, m=m, trials=trials, seed=seed)


def test_criterion_05_main_formula():
    cases = list(_mainth_cases(10, (1,)))
    assert any(c["xi"] == (1, 1, 1) and c["m"] == 2 for c in cases)
    assert any(c["xi"] == (1, 2, 1) and c["m"] == 2 for c in cases)
    count, first, secs = timed(cases)
    report(5, "main formula vs direct", first is None and secs < 600, f"{count} trials, {secs:.1f}s {first or ''}".strip())


def test_criterion_06_m_independence():
    count, first, secs = timed(shape_grid(["m-independence"], (3, 4), 5, 10, seeds=(1,)))
    report(6, "main formula independent of m", first is None, f"{count} trials, {secs:.1f}s {first or ''}".strip())


def test_criterion_07_reductions():
    zero = shape_grid(["xi-m-zero"], (3, 4), 4, 10, seeds=(1,), keep=lambda xi: 0 in xi)
    count, first, _ = timed(zero)
    # m = 1 and m = n-1 against every other cut at the same point
    ends_ok, compared = True, 0
    for n in (3, 4):
        for k, xi in enumerate(shapes_up_to(n, 4)):
            shape = Shape(xi)
            point = sample_assignment(shape, f"ends/{n}/{k}")
            module = VermaModule(point.lam)
            values = {m: mainth_rhs(n, m, shape, point, module=module) for m in range(1, n)}
            direct = bethe_direct(n, shape, point, module)
            for end in (1, n - 1):
                ends_ok &= all(values[end] == v for v in values.values()) and values[end] == direct
                compared += 1
    detail = f"{count} zero-block trials, {compared} end-cut comparisons {first or ''}".strip()
    report(7, "reductions xi_m=0, m=1, m=n-1", first is None and ends_ok, detail)


def test_criterion_08_scalar_identities():
    cases = []
    for name in ("exchange-wcor", "ulem", "wstat"):
        for n in (3, 4):
            for xi in shapes_up_to(n, 4):
                for m in range(1, n):
                    if xi[m - 1] <= 3:
                        cases.append(dict(name=name, n=n, xi=xi, m=m, trials=10, seed=1))
    cases.append(dict(name="sym-factorization", n=2, trials=10, seed=1))
    count, first, secs = timed(cases)
    report(8, "scalar identity suite", first is None and secs < 60, f"{count} trials, {secs:.1f}s {first or ''}".strip())


def _sq_cardinality_ok():
    for n in (2, 3, 4):
        for xi in itertools.product(range(4), repeat=n - 1):
            shape = Shape(xi)
            for m in range(1, n):
                for q in comb.enumerate_Q(n, m, shape):
                    pairs = comb.enumerate_Sq(q)
                    if len(set(pairs)) != math.factorial(shape[m]) // q.factorial_product():
                        return False
    return True


def _roundtrip_ok():
    for n in (2, 3, 4):
        for m in range(1, n):
            for M in range(4):
                for a in itertools.product(range(1, m + 1), repeat=M):
                    for b in itertools.product(range(m + 1, n + 1), repeat=M):
                        I, J = comb.seq_to_partitions(a, b, m, n)
                        if comb.partitions_to_seqs(I, J, m) != (a, b):
                            return False
    return True


def _cross_cut_commute_ok():
    module = VermaModule(("3/2", "-1/3", "5/7", "2"))
    probes = [module.basis_vector(mono) for mono in [(), ((2, 1, 1),), ((2, 1, 1), (4, 3, 1)), ((3, 2, 2),)]]
    for m in (1, 2, 3):
        cross = [(i, j) for i in range(m + 1, 5) for j in range(1, m + 1)]
        for p, q in itertools.combinations(cross, 2):
            for w in probes:
                if module.apply_word([p, q], w) != module.apply_word([q, p], w):
                    return False
    return True


def _sym_phi_ok():
    for k in range(1, 5):
        z = list(sample_assignment(Shape((k,)), f"phi/{k}").block(1))
        if symmetrize(comb.phi, z, [list(range(k))]) != math.factorial(k):
            return False
    return True


def test_criterion_09_structural_invariants():
    count, first = run_grid(shape_grid(["weight-invariant", "block-symmetry"], (2, 3, 4), 4, 3, seeds=(1,)))
    parts = {
        "weight and block symmetry": first is None,
        "S_q cardinality": _sq_cardinality_ok(),
        "bijection roundtrip": _roundtrip_ok(),
        "cross-cut commutativity": _cross_cut_commute_ok(),
        "Sym phi = k!": _sym_phi_ok(),
    }
    failed = [k for k, ok in parts.items() if not ok]
    report(9, "structural invariants", not failed, f"{count} vector trials" + (f"; failed: {failed}" if failed else ""))


def test_criterion_10_determinism(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    codes = [main(["sweep", "--config", str(SWEEP), "--out", str(out)]) for out in (first, second)]
    a, b = first.read_bytes(), second.read_bytes()
    report(10, "byte-identical sweep reports", codes == [0, 0] and a == b, f"{len(a)} bytes, exit codes {codes}")
