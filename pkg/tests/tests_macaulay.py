"""Brute-force Macaulay-matrix ideal membership oracle (exact rational linear
algebra over a monomial basis), independent of the Groebner engine.  Test-only.
"""

from fractions import Fraction
from itertools import product

from curvelim.exactpoly import Polynomial


def _monomials_up_to(table, degree, support):
    """All exponent tuples over ``support`` variable indices with total degree
    at most ``degree``."""
    idx = sorted(support)
    out = []
    for combo in product(range(degree + 1), repeat=len(idx)):
        if sum(combo) > degree:
            continue
        mono = [0] * len(table)
        for i, e in zip(idx, combo):
            mono[i] = e
        out.append(tuple(mono))
    return out


def macaulay_member(target, generators, degree=None, max_degree=6):
    """Decide target in <generators> by solving the linear system

        sum_i cofactor_i * g_i == target,   deg(cofactor_i) <= D - deg(g_i)

    raising D until it covers ``degree`` (when given) or ``max_degree``.
    Returns (member, D_used)."""
    table = target.table
    support = set()
    for p in [target] + list(generators):
        for m in p.terms:
            for i, e in enumerate(m):
                if e:
                    support.add(i)
    lo = target.total_degree()
    hi = max(lo, degree if degree is not None else 0,
             max(g.total_degree() for g in generators))
    top = max(hi + (degree if degree is not None else 0), max_degree)
    for D in range(lo, top + 1):
        if _solvable(target, generators, D, table, support):
            return True, D
    return False, top


def _solvable(target, generators, D, table, support):
    columns = []  # (gen index, multiplier monomial)
    rows = {}
    entries = []
    for gi, g in enumerate(generators):
        gdeg = g.total_degree()
        if gdeg > D + g.total_degree():
            continue
        for mult in _monomials_up_to(table, max(D - gdeg, 0), support):
            col = len(columns)
            columns.append((gi, mult))
            for m, c in g.terms.items():
                mm = tuple(a + b for a, b in zip(m, mult))
                r = rows.setdefault(mm, len(rows))
                entries.append((r, col, Fraction(c)))
    rhs_index = {}
    for m, c in target.terms.items():
        if m not in rows:
            return False
        rhs_index[rows[m]] = Fraction(c)
    nrows, ncols = len(rows), len(columns)
    mat = [[Fraction(0)] * (ncols + 1) for _ in range(nrows)]
    for r, col, c in entries:
        mat[r][col] += c
    for r, c in rhs_index.items():
        mat[r][ncols] = c
    # exact gaussian elimination
    pivot_row = 0
    for col in range(ncols):
        sel = None
        for r in range(pivot_row, nrows):
            if mat[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        mat[pivot_row], mat[sel] = mat[sel], mat[pivot_row]
        pv = mat[pivot_row][col]
        mat[pivot_row] = [x / pv for x in mat[pivot_row]]
        for r in range(nrows):
            if r != pivot_row and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[pivot_row])]
        pivot_row += 1
        if pivot_row == nrows:
            break
    for r in range(nrows):
        if mat[r][ncols] != 0 and all(mat[r][c] == 0 for c in range(ncols)):
            return False
    return True
