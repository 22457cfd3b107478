#!/usr/bin/env python3
"""Solve WCNF files with the stratified RC2 MaxSAT solver from python-sat.

Stratification keeps RC2 fast on the steep lexicographic weight ladders.

Prints one line per file: "<path> <satisfied soft weight> <falsified soft weight>".
Exits 2 when python-sat is unavailable and 1 when a file has unsatisfiable hard clauses.
"""
import sys

try:
    from pysat.examples.rc2 import RC2Stratified
    from pysat.formula import WCNF
except ImportError:
    print("python-sat is not installed", file=sys.stderr)
    sys.exit(2)


def main(paths):
    status = 0
    for path in paths:
        wcnf = WCNF(from_file=path)
        total = sum(wcnf.wght)
        with RC2Stratified(wcnf, blo="div", exhaust=True, minz=True) as rc2:
            model = rc2.compute()
            if model is None:
                print(f"{path} UNSAT")
                status = 1
                continue
            print(f"{path} {total - rc2.cost} {rc2.cost}")
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
