#!/usr/bin/env python3
"""Solve an LP file produced by `teamdag lp` and print its optimal value.

Parses the CPLEX-style subset emitted by the exporter (Minimize, Subject
To, Bounds with `free` markers, End) and solves with scipy's HiGHS backend.
Exits 0 and prints `optimal <value>` on success.
"""
import re
import sys

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import lil_matrix

TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][A-Za-z0-9_]*)")


def parse_terms(text):
    """Linear expression -> list of (coefficient, variable)."""
    out = []
    for sign, coef, var in TERM.findall(text):
        c = float(coef) if coef else 1.0
        if sign == "-":
            c = -c
        out.append((c, var))
    return out


def parse(path):
    section = None
    objective = []
    rows = []  # (terms, op, rhs)
    free = set()
    with open(path) as f:
        for raw in f:
            line = raw.strip()
            if not line or line.startswith("\\"):
                continue
            low = line.lower()
            if low in ("minimize", "maximize"):
                section = "obj"
                sense = 1.0 if low == "minimize" else -1.0
                continue
            if low == "subject to":
                section = "rows"
                continue
            if low == "bounds":
                section = "bounds"
                continue
            if low == "end":
                break
            if section == "obj":
                body = line.split(":", 1)[1] if ":" in line else line
                objective += parse_terms(body)
            elif section == "rows":
                body = line.split(":", 1)[1] if ":" in line else line
                m = re.search(r"(<=|>=|=)", body)
                lhs, op, rhs = body[: m.start()], m.group(1), body[m.end() :]
                rows.append((parse_terms(lhs), op, float(rhs)))
            elif section == "bounds":
                parts = line.split()
                if len(parts) == 2 and parts[1].lower() == "free":
                    free.add(parts[0])
                else:
                    raise SystemExit(f"unsupported bounds line: {line}")
    return sense, objective, rows, free


def main():
    if len(sys.argv) != 2:
        raise SystemExit("usage: solve_lp.py FILE.lp")
    sense, objective, rows, free = parse(sys.argv[1])

    names = {}
    def vid(v):
        if v not in names:
            names[v] = len(names)
        return names[v]
    for terms, _, _ in rows:
        for _, v in terms:
            vid(v)
    for _, v in objective:
        vid(v)

    n = len(names)
    c = np.zeros(n)
    for coef, v in objective:
        c[vid(v)] += sense * coef

    eq_rows = [r for r in rows if r[1] == "="]
    ub_rows = [r for r in rows if r[1] != "="]
    a_eq = lil_matrix((len(eq_rows), n))
    b_eq = np.zeros(len(eq_rows))
    for i, (terms, _, rhs) in enumerate(eq_rows):
        for coef, v in terms:
            a_eq[i, vid(v)] += coef
        b_eq[i] = rhs
    a_ub = lil_matrix((len(ub_rows), n))
    b_ub = np.zeros(len(ub_rows))
    for i, (terms, op, rhs) in enumerate(ub_rows):
        flip = -1.0 if op == ">=" else 1.0  # >= rows become <= by negation
        for coef, v in terms:
            a_ub[i, vid(v)] += flip * coef
        b_ub[i] = flip * rhs

    bounds = [(None, None) if v in free else (0.0, None) for v in names]
    res = linprog(
        c,
        A_ub=a_ub.tocsr() if ub_rows else None,
        b_ub=b_ub if ub_rows else None,
        A_eq=a_eq.tocsr() if eq_rows else None,
        b_eq=b_eq if eq_rows else None,
        bounds=bounds,
        method="highs",
    )
    if not res.success:
        raise SystemExit(f"solver failed: {res.message}")
    print(f"optimal {sense * res.fun:.12g}")


if __name__ == "__main__":
    main()
