"""Exact Gaussian elimination over the rationals."""
from fractions import Fraction


class SingularSystem(ArithmeticError):
    pass


def solve(matrix, rhs):
    """Solve ``matrix @ x = rhs`` exactly.

    ``matrix`` is a list of rows of Fractions (square), ``rhs`` a list.
    Rows are stored sparsely during elimination, which keeps the
    transition-shaped systems produced by the solvers cheap.
    """
    n = len(rhs)
    rows = []
    for i in range(n):
        row = {j: Fraction(v) for j, v in enumerate(matrix[i]) if v}
        rows.append([row, Fraction(rhs[i])])
    return _solve_sparse(rows, n)


def solve_sparse(rows, rhs, n):
    """Like :func:`solve` but ``rows`` are ``{column: coefficient}`` dicts."""
    return _solve_sparse([[dict(r), Fraction(b)] for r, b in zip(rows, rhs)], n)


def _solve_sparse(rows, n):
    for col in range(n):
        pivot = None
        for i in range(col, n):
            if rows[i][0].get(col):
                pivot = i
                break
        if pivot is None:
            raise SingularSystem("no pivot in column %d" % col)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        prow, pb = rows[col]
        inv = 1 / prow[col]
        prow = {j: v * inv for j, v in prow.items()}
        pb = pb * inv
        rows[col] = [prow, pb]
        for i in range(n):
            if i == col:
                continue
            row, b = rows[i]
            f = row.get(col)
            if not f:
                continue
            for j, v in prow.items():
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
            rows[i][1] = b - f * pb
    return [rows[i][1] for i in range(n)]
