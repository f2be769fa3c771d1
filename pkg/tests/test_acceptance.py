"""The eleven acceptance criteria at their stated sizes and tolerances.

Each test prints one PASS/FAIL line; the lines are repeated in the terminal
summary.  Run this file directly for the table alone:

    python3 tests/test_acceptance.py
"""

import pytest

from freebound.verify import CRITERIA, run_criterion


def _describe(res):
    lines = [res.line()]
    for v in res.verdicts:
        if not v["pass"]:
            lines.append(f"    failed {v['name']}: measured {v['measured']!r}, expected {v['expected']!r}, "
                         f"tolerance {v['tolerance']!r}")
    return lines


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"C{c[0]}" for c in CRITERIA])
def test_criterion(number, acceptance_lines):
    res = run_criterion(number, quick=False)
    lines = _describe(res)
    print(lines[0])
    acceptance_lines.append(lines[0])
    assert res.passed, "\n".join(lines)


if __name__ == "__main__":
    import sys

    ok = True
    for num, _, _ in CRITERIA:
        res = run_criterion(num)
        print("\n".join(_describe(res)), flush=True)
        ok &= res.passed
    sys.exit(0 if ok else 1)
