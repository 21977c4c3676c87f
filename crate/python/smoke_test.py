"""Smoke test for the pycollatz extension module.

Build and install first, e.g.:

    pip install --no-build-isolation ./crates/python
"""

from fractions import Fraction
import json

import pycollatz


def main():
    assert pycollatz.trajectory(7)[-5:] == [16, 8, 4, 2, 1]
    assert len(pycollatz.trajectory(7)) == 16
    assert pycollatz.tso(27) == 111
    assert pycollatz.pso(27) == (96, 23)
    assert pycollatz.peak(27) == 9232
    assert pycollatz.collatz_step(2**200 + 1) == 3 * (2**200 + 1) + 1

    try:
        pycollatz.tso(27, max_steps=10)
    except pycollatz.BudgetExceeded:
        pass
    else:
        raise AssertionError("expected BudgetExceeded")

    report = pycollatz.verify_range(2, 10_000)
    assert report["max_tso"] == {"value": 261, "n": 6171}, report["max_tso"]

    assert all(r["passed"] for r in pycollatz.properties(2_000))
    assert pycollatz.table_summary(1, 2) == "n,pso,tso\n1,NA,3\n2,1,1\n"
    assert pycollatz.pso_histogram(32, 23, 0, 99) == {8: 100}

    result = pycollatz.sieve(4, 3, 13, 2**12)
    terminal = sorted(
        (leaf["modulus"], leaf["remainder"], leaf["pso"])
        for leaf in result.leaves()
        if leaf["status"] == "terminal"
    )
    assert (16, 3, 6) in terminal and len(terminal) == 13
    assert result.coverage() == Fraction(45, 64)
    assert result.cross_check(20)["members_checked"] == 260
    tree = json.loads(result.export_json())
    assert tree["nodes"][0]["class"] == {"modulus": "4", "remainder": "3"}
    assert result.export_dot().startswith("digraph sieve {")
    print("pycollatz smoke test passed:", result)


if __name__ == "__main__":
    main()
