#!/usr/bin/env python3
"""Smoke test for the cnfxor_py extension module.

Locates the compiled library under target/, exposes it as an importable
module, and exercises every binding once. Build the module first:

    cargo build -p cnfxor-py --release
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def import_module():
    candidates = [
        REPO_ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libcnfxor_py.so", "libcnfxor_py.dylib", "cnfxor_py.dll")
    ]
    library = next((c for c in candidates if c.exists()), None)
    if library is None:
        sys.exit(
            "cnfxor_py library not found; run `cargo build -p cnfxor-py --release` first"
        )
    stage = Path(tempfile.mkdtemp(prefix="cnfxor_py_"))
    suffix = ".pyd" if library.suffix == ".dll" else ".so"
    shutil.copy2(library, stage / f"cnfxor_py{suffix}")
    sys.path.insert(0, str(stage))
    import cnfxor_py

    return cnfxor_py


def main():
    m = import_module()
    checks = 0

    def check(name, condition):
        nonlocal checks
        if not condition:
            sys.exit(f"FAIL {name}")
        checks += 1
        print(f"ok {name}")

    # Sampling is deterministic and shaped by the ceiling counts.
    f = m.sample(k=3, n=20, r=1.5, s=0.45, p=0.5, seed=11)
    check("sample shape", f.n == 20 and f.cnf_count == 30 and f.xor_count == 9)
    g = m.sample(k=3, n=20, r=1.5, s=0.45, p=0.5, seed=11)
    check("sample determinism", f.to_dimacs() == g.to_dimacs())

    # DIMACS round trip.
    parsed = m.Formula.from_dimacs(f.to_dimacs())
    check("dimacs round trip", parsed.to_dimacs() == f.to_dimacs())

    # Solving produces a verified witness.
    outcome = m.solve_formula(f, timeout_s=10.0, seed=0)
    check("solve status", outcome.status in ("SAT", "UNSAT"))
    if outcome.status == "SAT":
        check("witness satisfies formula", f.evaluate(outcome.witness))

    # The solver agrees with exhaustive enumeration on a small instance.
    small = m.sample(k=3, n=10, r=2.0, s=0.4, p=0.5, seed=3)
    sols = m.enumerate_solutions(small, cap=2048)
    small_outcome = m.solve_formula(small)
    check(
        "solver matches enumeration",
        (len(sols) > 0) == (small_outcome.status == "SAT"),
    )

    # Separation via pairwise distances equals the null-space route on an
    # XOR-only formula.
    q = m.sample(k=3, n=14, r=0.0, s=0.5, p=0.5, seed=8)
    summary = m.xor_system_summary(q)
    if summary["consistent"]:
        report = m.separation_report(q, cap=4096)
        check(
            "separation equals kernel min weight",
            report["min_pairwise_distance"] == report["kernel_min_weight"],
        )
        check(
            "solution count is 2^(n - rank)",
            report["solution_count"] == 2 ** summary["log2_solutions"],
        )

    check("hamming", m.hamming([True, False, True, True], [False, False, True, False]) == 2)

    # Closed forms.
    check("parity value", abs(m.parity_even_probability(0.1, 3) - 0.756) < 1e-12)
    check("entropy at 1/2", abs(m.entropy(0.5) - math.log(2)) < 1e-12)
    check("a(delta) near 2", abs(m.a_of_delta(1e-6) - 2.0) < 1e-4)
    lam = m.lambda_star(0.5, 0.5)
    check("lambda* equation", abs(m.entropy(lam) - 0.5 * math.log(1.5)) < 1e-10)
    # At p = 1/2 every parity term is 2^-m, so the sum is (2^n - 1) / 2^m.
    bound = m.union_bound_sum(10, 0.5, 0.5, 10)
    expected = math.log((2**10 - 1) * 2.0**-5)
    check("union bound", abs(bound - expected) < 1e-9)
    delta, fraction = m.guaranteed_separation_fraction(0.5, 3.0)
    check("certificate fraction", 0.0 < fraction < 0.25 and 0.0 < delta < 1.0)
    check(
        "threshold value",
        abs(m.separation_threshold(0.5, 2.5, 1000) - 2.5 * math.log(500) / 500) < 1e-12,
    )

    # Curve fitting recovers exact models.
    points = [(n, 0.001 * 2 ** (0.05 * n)) for n in range(10, 61, 5)]
    fit = m.fit_curves(points)
    check("fit selects exponential", fit["selected"] == "exponential")
    check("fit recovers alpha", abs(fit["scaling_factor"] - 0.05) < 1e-9)

    print(f"all {checks} smoke checks passed")


if __name__ == "__main__":
    main()
