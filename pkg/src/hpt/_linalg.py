"""Dense Gaussian elimination over the rationals.

Matrices are lists of rows of Fractions.  These are only used on small
per-degree blocks; everything else in the package is sparse.
"""

from fractions import Fraction


def rref(rows, ncols):
    """Reduced row echelon form.  Returns (reduced rows, pivot columns).

    Pivots are chosen greedily left to right, so the pivot columns are the
    first columns independent of their predecessors.
    """
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / Fraction(m[r][c])
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows, ncols):
    return len(rref(rows, ncols)[1])


def nullspace(rows, ncols):
    """Basis of {v : rows . v = 0}, one vector per free column.

    The vector attached to free column j has a 1 in position j and zeros
    in the other free positions.
    """
    red, pivots = rref(rows, ncols)
    free = [j for j in range(ncols) if j not in set(pivots)]
    basis = []
    for j in free:
        v = [Fraction(0)] * ncols
        v[j] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[j]
        basis.append((j, v))
    return basis


def inverse(mat):
    n = len(mat)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(mat)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red[:n]]


def independent_subset(vectors, start=()):
    """Greedily pick indices of `vectors` independent modulo span(start)."""
    basis = [list(v) for v in start]
    chosen = []
    width = len(vectors[0]) if vectors else 0
    current = rank(basis, width) if basis else 0
    for i, v in enumerate(vectors):
        trial = basis + [list(v)]
        r = rank(trial, width)
        if r > current:
            basis = trial
            current = r
            chosen.append(i)
    return chosen


def solve(rows, ncols, rhs):
    """A particular solution v of rows . v = rhs (free variables zero), or
    None if inconsistent."""
    aug = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    v = [Fraction(0)] * ncols
    for r, p in zip(red, pivots):
        v[p] = r[ncols]
    return v
