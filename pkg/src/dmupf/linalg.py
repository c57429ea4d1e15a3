"""Dense linear algebra over a :class:`~dmupf.field.GF`.

Matrices are immutable row-major tuples of field elements. Elimination
always uses the same pivot rule (columns left to right, first nonzero row
at or below the current one), so every derived quantity is a deterministic
function of the input. In particular :func:`solve_particular` is a linear
map of the right-hand side for a fixed matrix.
"""

from __future__ import annotations

from .errors import SingularMatrixError, UsageError


class Matrix:
    __slots__ = ("ctx", "rows", "cols", "data")

    def __init__(self, ctx, data, cols=None):
        data = tuple(tuple(int(x) for x in row) for row in data)
        if cols is None:
            cols = len(data[0]) if data else 0
        for row in data:
            if len(row) != cols:
                raise UsageError("ragged matrix rows")
            for x in row:
                ctx.check(x)
        self.ctx = ctx
        self.rows = len(data)
        self.cols = cols
        self.data = data

    @classmethod
    def zeros(cls, ctx, rows, cols):
        return cls(ctx, [[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, ctx, n):
        return cls(ctx, [[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_columns(cls, ctx, columns, rows):
        columns = list(columns)
        return cls(ctx, [[c[i] for c in columns] for i in range(rows)], cols=len(columns))

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.ctx == other.ctx
                and self.shape == other.shape and self.data == other.data)

    def __hash__(self):
        return hash((self.shape, self.data))

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols} over {self.ctx!r}, {list(map(list, self.data))})"

    def row(self, i):
        return self.data[i]

    def column(self, j):
        return tuple(r[j] for r in self.data)

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def transpose(self):
        return Matrix.from_columns(self.ctx, self.data, self.cols)

    def select_rows(self, indices):
        return Matrix(self.ctx, [self.data[i] for i in indices], cols=self.cols)

    def select_columns(self, indices):
        indices = list(indices)
        return Matrix(self.ctx, [[r[j] for j in indices] for r in self.data], cols=len(indices))

    def hstack(self, other):
        if self.rows != other.rows:
            raise UsageError("hstack needs equal row counts")
        return Matrix(self.ctx, [a + b for a, b in zip(self.data, other.data)],
                      cols=self.cols + other.cols)

    def apply(self, vec):
        """Matrix-vector product."""
        if len(vec) != self.cols:
            raise UsageError(f"vector of length {len(vec)} for a {self.rows}x{self.cols} matrix")
        return tuple(_dot(self.ctx, row, vec) for row in self.data)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise UsageError(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.columns()
            return Matrix(self.ctx, [[_dot(self.ctx, r, c) for c in cols] for r in self.data],
                          cols=other.cols)
        return self.apply(other)

    def __add__(self, other):
        if self.shape != other.shape:
            raise UsageError("shape mismatch")
        add = self.ctx.add
        return Matrix(self.ctx, [[add(a, b) for a, b in zip(r, s)]
                                 for r, s in zip(self.data, other.data)], cols=self.cols)


def _dot(ctx, u, v):
    add, mul = ctx.add, ctx.mul
    acc = 0
    for a, b in zip(u, v):
        if a and b:
            acc = add(acc, mul(a, b))
    return acc


def vec_add(ctx, u, v):
    return tuple(ctx.add(a, b) for a, b in zip(u, v))


def vec_scale(ctx, c, v):
    return tuple(ctx.mul(c, a) for a in v)


def _rref(ctx, rows, ncols):
    """In-place reduced row echelon form on the first ``ncols`` columns.

    Row operations are applied to the full rows, so trailing augmented
    columns are carried along. Returns the pivot column list.
    """
    sub, mul, inv = ctx.sub, ctx.mul, ctx.inv
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        s = inv(rows[r][c])
        if s != 1:
            rows[r] = [mul(s, x) for x in rows[r]]
        pr = rows[r]
        for i in range(nrows):
            f = rows[i][c]
            if i != r and f:
                rows[i] = [sub(a, mul(f, b)) if b else a for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return pivots


def rref(M):
    """Reduced row echelon form and pivot columns of ``M``."""
    rows = [list(r) for r in M.data]
    pivots = _rref(M.ctx, rows, M.cols)
    return Matrix(M.ctx, rows, cols=M.cols), pivots


def rank(M):
    return len(rref(M)[1])


def solve_particular(M, b):
    """One solution ``u`` of ``M u = b``, or ``None`` when the system is inconsistent.

    Free variables are set to zero, so for a fixed ``M`` the result is a
    linear function of ``b``.
    """
    if len(b) != M.rows:
        raise UsageError(f"right-hand side has length {len(b)}, matrix has {M.rows} rows")
    rows = [list(r) + [int(x)] for r, x in zip(M.data, b)]
    pivots = _rref(M.ctx, rows, M.cols)
    for i in range(len(pivots), M.rows):
        if rows[i][-1]:
            return None
    u = [0] * M.cols
    for i, c in enumerate(pivots):
        u[c] = rows[i][-1]
    return tuple(u)


def particular_map(M, rhs):
    """Matrix ``P`` with ``solve_particular(M, rhs @ s) == P @ s`` for every consistent ``s``.

    Raises when some column of ``rhs`` is outside the column space of ``M``.
    """
    cols = []
    for j, col in enumerate(rhs.columns()):
        u = solve_particular(M, col)
        if u is None:
            raise UsageError(f"column {j} of the right-hand side is not in the column space")
        cols.append(u)
    return Matrix.from_columns(M.ctx, cols, M.cols)


def nullspace_basis(M):
    """Matrix whose columns form a basis of ``{u : M u = 0}``."""
    ctx = M.ctx
    R, pivots = rref(M)
    pivot_set = set(pivots)
    basis = []
    for f in range(M.cols):
        if f in pivot_set:
            continue
        u = [0] * M.cols
        u[f] = 1
        for i, c in enumerate(pivots):
            u[c] = ctx.neg(R[i, f])
        basis.append(u)
    return Matrix.from_columns(ctx, basis, M.cols)


def vandermonde(ctx, points, ncols):
    """Entry (i, j) is ``points[i] ** j`` (with ``0 ** 0 == 1``)."""
    rows = []
    for p in points:
        row, acc = [], 1
        for _ in range(ncols):
            row.append(acc)
            acc = ctx.mul(acc, p)
        rows.append(row)
    return Matrix(ctx, rows, cols=ncols)


def invert(M):
    if M.rows != M.cols:
        raise UsageError(f"cannot invert a {M.rows}x{M.cols} matrix")
    n = M.rows
    rows = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(M.data)]
    pivots = _rref(M.ctx, rows, n)
    if len(pivots) < n:
        raise SingularMatrixError(f"matrix has rank {len(pivots)} < {n}")
    return Matrix(M.ctx, [r[n:] for r in rows], cols=n)
