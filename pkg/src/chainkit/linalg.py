"""Exact integer matrices: Smith and Hermite forms, kernels and linear solving.

Everything works over the integers with Python's arbitrary precision ints.
Arithmetic modulo m is done by appending m times the identity as extra
columns and working over the integers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


class DimensionError(ValueError):
    pass


class IntMatrix:
    """Immutable dense integer matrix stored row-major."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, rows: Iterable[Sequence[int]] = (), ncols: Optional[int] = None):
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            if not data:
                raise DimensionError("ncols is required for a matrix with no rows")
            ncols = len(data[0])
        for r in data:
            if len(r) != ncols:
                raise DimensionError("ragged matrix rows")
        self.nrows = len(data)
        self.ncols = ncols
        self.rows = data

    # construction helpers
    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def diag(cls, entries: Sequence[int], nrows: Optional[int] = None,
             ncols: Optional[int] = None) -> "IntMatrix":
        nrows = len(entries) if nrows is None else nrows
        ncols = len(entries) if ncols is None else ncols
        rows = [[0] * ncols for _ in range(nrows)]
        for i, d in enumerate(entries):
            rows[i][i] = d
        return cls(rows, ncols)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]], nrows: int) -> "IntMatrix":
        for c in cols:
            if len(c) != nrows:
                raise DimensionError("column length mismatch")
        return cls([[c[i] for c in cols] for i in range(nrows)], len(cols))

    # access
    def __getitem__(self, i: int) -> tuple:
        return self.rows[i]

    def column(self, j: int) -> list[int]:
        return [r[j] for r in self.rows]

    def columns(self) -> list[list[int]]:
        return [self.column(j) for j in range(self.ncols)]

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def to_list(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    # algebra
    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(zip(*self.rows), self.nrows) if self.nrows else IntMatrix.zeros(self.ncols, 0)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append([sum(a * c[k] for k, a in nz) for c in cols])
        return IntMatrix(out, other.ncols)

    def apply(self, v: Sequence[int]) -> list[int]:
        if len(v) != self.ncols:
            raise DimensionError("vector length mismatch")
        return [sum(a * x for a, x in zip(r, v) if a) for r in self.rows]

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch")
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self.rows], self.ncols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix([[k * a for a in r] for r in self.rows], self.ncols)

    def mod(self, m: int) -> "IntMatrix":
        return IntMatrix([[a % m for a in r] for r in self.rows], self.ncols)

    def select_rows(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix([self.rows[i] for i in idx], self.ncols)

    def select_cols(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix([[r[j] for j in idx] for r in self.rows], len(idx))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IntMatrix) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_list()!r}, ncols={self.ncols})"


def hstack(*mats: IntMatrix) -> IntMatrix:
    if not mats:
        raise DimensionError("nothing to stack")
    n = mats[0].nrows
    if any(m.nrows != n for m in mats):
        raise DimensionError("row count mismatch in hstack")
    ncols = sum(m.ncols for m in mats)
    return IntMatrix([sum((m.rows[i] for m in mats), ()) for i in range(n)], ncols)


def vstack(*mats: IntMatrix) -> IntMatrix:
    if not mats:
        raise DimensionError("nothing to stack")
    c = mats[0].ncols
    if any(m.ncols != c for m in mats):
        raise DimensionError("column count mismatch in vstack")
    return IntMatrix([r for m in mats for r in m.rows], c)


def block_diag(*mats: IntMatrix) -> IntMatrix:
    nrows = sum(m.nrows for m in mats)
    ncols = sum(m.ncols for m in mats)
    out = [[0] * ncols for _ in range(nrows)]
    r0 = c0 = 0
    for m in mats:
        for i, row in enumerate(m.rows):
            out[r0 + i][c0:c0 + m.ncols] = row
        r0 += m.nrows
        c0 += m.ncols
    return IntMatrix(out, ncols)


def kron(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    """Kronecker product; row index (i, k) maps to i * b.nrows + k."""
    rows = []
    for ra in a.rows:
        for rb in b.rows:
            rows.append([x * y for x in ra for y in rb])
    return IntMatrix(rows, a.ncols * b.ncols)


def det(a: IntMatrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = a.nrows
    if n != a.ncols:
        raise DimensionError("determinant of a non-square matrix")
    if n == 0:
        return 1
    m = a.to_list()
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with g = s*a + t*b = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


# ---------------------------------------------------------------------------
# Smith normal form

@dataclass(frozen=True)
class SnfResult:
    """A = U * D * V with D the rows x cols matrix carrying d on its diagonal.

    U_inv and V_inv are the transforms with D = U_inv * A * V_inv.
    """

    d: tuple[int, ...]
    U: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for x in self.d if x)

    def diagonal_matrix(self) -> IntMatrix:
        return IntMatrix.diag(self.d, self.U.nrows, self.V.nrows)


def snf(a: IntMatrix) -> SnfResult:
    """Smith normal form with unimodular certificates.

    The pivot is always the nonzero entry of least absolute value in the
    untreated block, ties going to the lowest (row, col).
    """
    r, c = a.shape
    A = a.to_list()
    P = IntMatrix.identity(r).to_list()      # P A Q = D
    Pinv = IntMatrix.identity(r).to_list()
    Q = IntMatrix.identity(c).to_list()
    Qinv = IntMatrix.identity(c).to_list()

    def swap_rows(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            P[i], P[j] = P[j], P[i]
            for row in Pinv:
                row[i], row[j] = row[j], row[i]

    def add_row(i, j, k):  # row_i += k * row_j
        if k:
            Ai, Aj = A[i], A[j]
            for t in range(c):
                if Aj[t]:
                    Ai[t] += k * Aj[t]
            Pi, Pj = P[i], P[j]
            for t in range(r):
                if Pj[t]:
                    Pi[t] += k * Pj[t]
            for row in Pinv:
                if row[i]:
                    row[j] -= k * row[i]

    def neg_row(i):
        A[i] = [-x for x in A[i]]
        P[i] = [-x for x in P[i]]
        for row in Pinv:
            row[i] = -row[i]

    def swap_cols(i, j):
        if i != j:
            for row in A:
                row[i], row[j] = row[j], row[i]
            for row in Q:
                row[i], row[j] = row[j], row[i]
            Qinv[i], Qinv[j] = Qinv[j], Qinv[i]

    def add_col(i, j, k):  # col_i += k * col_j
        if k:
            for row in A:
                if row[j]:
                    row[i] += k * row[j]
            for row in Q:
                if row[j]:
                    row[i] += k * row[j]
            Qi, Qj = Qinv[i], Qinv[j]
            for t in range(c):
                if Qi[t]:
                    Qj[t] -= k * Qi[t]

    def pick(t):
        best = None
        for i in range(t, r):
            row = A[i]
            for j in range(t, c):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        return best
        return best

    d = []
    for t in range(min(r, c)):
        best = pick(t)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, r):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, c):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    dirty = dirty or A[t][j] != 0
            if dirty:
                best = pick(t)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c)
                        if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            neg_row(t)
        d.append(A[t][t])
    d += [0] * (min(r, c) - len(d))
    return SnfResult(tuple(d), IntMatrix(Pinv, r), IntMatrix(Qinv, c),
                     IntMatrix(P, r), IntMatrix(Q, c))


# ---------------------------------------------------------------------------
# Incremental Hermite-style echelon over sparse columns.
#
# Columns are inserted one at a time and reduced by unimodular two-column
# operations against the pivots found so far.  Every insertion ends with a
# new pivot or a zero vector; the combinations recorded for the zero vectors
# form a lattice basis of the kernel.

class _Echelon:
    def __init__(self):
        self.pivots: dict[int, tuple[dict, dict]] = {}
        self.kernel: list[dict] = []

    def insert(self, v: dict, comb: dict) -> None:
        while v:
            p = min(v)
            if p not in self.pivots:
                self.pivots[p] = (v, comb)
                return
            h, hc = self.pivots[p]
            a, b = h[p], v[p]
            if b % a == 0:
                q = b // a
                v = _axpy(v, h, -q)
                comb = _axpy(comb, hc, -q)
                continue
            g, s, t = xgcd(a, b)
            new_h = _lin(h, s, v, t)
            new_hc = _lin(hc, s, comb, t)
            v = _lin(h, b // g, v, -(a // g))
            comb = _lin(hc, b // g, comb, -(a // g))
            self.pivots[p] = (new_h, new_hc)
        self.kernel.append(comb)

    def reduce(self, b: dict) -> Optional[dict]:
        """Express b in the span; returns the combination or None."""
        x: dict = {}
        b = dict(b)
        while b:
            p = min(b)
            if p not in self.pivots:
                return None
            h, hc = self.pivots[p]
            q, rem = divmod(b[p], h[p])
            if rem:
                return None
            b = _axpy(b, h, -q)
            x = _axpy(x, hc, q)
        return x


def _axpy(y: dict, x: dict, k: int) -> dict:
    out = dict(y)
    for i, v in x.items():
        s = out.get(i, 0) + k * v
        if s:
            out[i] = s
        else:
            out.pop(i, None)
    return out


def _lin(x: dict, a: int, y: dict, b: int) -> dict:
    out = {}
    for i in x.keys() | y.keys():
        s = a * x.get(i, 0) + b * y.get(i, 0)
        if s:
            out[i] = s
    return out


def _echelon_of_columns(a: IntMatrix) -> _Echelon:
    ech = _Echelon()
    for j in range(a.ncols):
        col = {i: a.rows[i][j] for i in range(a.nrows) if a.rows[i][j]}
        ech.insert(col, {j: 1})
    return ech


def _dense(v: dict, n: int) -> list[int]:
    out = [0] * n
    for i, x in v.items():
        out[i] = x
    return out


def _with_modulus(a: IntMatrix, modulus: Optional[int]) -> IntMatrix:
    if not modulus:
        return a
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    return hstack(a, IntMatrix.identity(a.nrows).scale(modulus))


def solve(a: IntMatrix, b: Sequence[int], modulus: Optional[int] = None) -> Optional[list[int]]:
    """Some x with a x = b (over Z, or mod m), or None when no solution exists."""
    if len(b) != a.nrows:
        raise DimensionError(f"right-hand side has length {len(b)}, expected {a.nrows}")
    aa = _with_modulus(a, modulus)
    ech = _echelon_of_columns(aa)
    x = ech.reduce({i: v for i, v in enumerate(b) if v})
    if x is None:
        return None
    sol = _dense(x, aa.ncols)[:a.ncols]
    if modulus:
        sol = [v % modulus for v in sol]
    return sol


def solve_many(a: IntMatrix, bs: IntMatrix, modulus: Optional[int] = None) -> Optional[IntMatrix]:
    """Solve a X = B column by column, sharing one echelon form."""
    if bs.nrows != a.nrows:
        raise DimensionError("row count mismatch")
    aa = _with_modulus(a, modulus)
    ech = _echelon_of_columns(aa)
    cols = []
    for j in range(bs.ncols):
        x = ech.reduce({i: bs.rows[i][j] for i in range(bs.nrows) if bs.rows[i][j]})
        if x is None:
            return None
        sol = _dense(x, aa.ncols)[:a.ncols]
        if modulus:
            sol = [v % modulus for v in sol]
        cols.append(sol)
    return IntMatrix.from_columns(cols, a.ncols)


def _normalize_sign(v: list[int]) -> list[int]:
    for x in v:
        if x:
            return v if x > 0 else [-y for y in v]
    return v


def kernel_basis(a: IntMatrix, modulus: Optional[int] = None) -> IntMatrix:
    """Columns generating {x : a x = 0}; a lattice basis over Z."""
    aa = _with_modulus(a, modulus)
    ech = _echelon_of_columns(aa)
    cols = []
    seen = set()
    for comb in ech.kernel:
        v = _dense(comb, aa.ncols)[:a.ncols]
        if modulus:
            v = [x % modulus for x in v]
            if not any(v) or tuple(v) in seen:
                continue
            seen.add(tuple(v))
        cols.append(_normalize_sign(v))
    return IntMatrix.from_columns(cols, a.ncols)


def hnf_rows(a: IntMatrix) -> IntMatrix:
    """Row-style Hermite normal form; the nonzero rows span the row lattice.

    Pivots are positive and entries above each pivot are reduced into
    [0, pivot).
    """
    ech = _echelon_of_columns(a.T)
    piv = sorted(ech.pivots)
    rows = []
    for p in piv:
        h = ech.pivots[p][0]
        if h[p] < 0:
            h = {i: -x for i, x in h.items()}
        rows.append(_dense(h, a.ncols))
    for k in range(len(rows) - 1, -1, -1):
        p = piv[k]
        for i in range(k):
            q = rows[i][p] // rows[k][p]
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[k])]
    return IntMatrix(rows, a.ncols)


def reduce_mod_lattice(v: Sequence[int], hnf: IntMatrix) -> list[int]:
    """Canonical representative of v modulo the row lattice given in HNF."""
    v = list(v)
    for row in hnf.rows:
        p = next(i for i, x in enumerate(row) if x)
        q = v[p] // row[p]
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    return v


def rank(a: IntMatrix) -> int:
    return len(_echelon_of_columns(a).pivots)
