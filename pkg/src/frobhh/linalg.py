"""Exact sparse/dense linear algebra over the supported fields.

Vectors are dicts {index: raw field value}; matrices are COO triples with
summed-duplicate semantics.  Small problems go through dense reduced row
echelon; large ranks/kernels stream through the echelon engines in _ffelim.
"""

from __future__ import annotations

import numpy as np

from ._ffelim import new_echelon
from .errors import NotASubspace

# ---------------------------------------------------------------------------
# dict vectors


def vec_add(field, a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        nv = field.add(out.get(k, field.zero), v)
        if field.is_zero(nv):
            out.pop(k, None)
        else:
            out[k] = nv
    return out


def vec_scale(field, c, a: dict) -> dict:
    if field.is_zero(c):
        return {}
    return {k: field.mul(c, v) for k, v in a.items()}


def vec_sub(field, a: dict, b: dict) -> dict:
    return vec_add(field, a, vec_scale(field, field.neg(field.one), b))


def vec_addmul(field, acc: dict, c, a: dict) -> None:
    """acc += c*a in place."""
    if field.is_zero(c):
        return
    for k, v in a.items():
        nv = field.add(acc.get(k, field.zero), field.mul(c, v))
        if field.is_zero(nv):
            acc.pop(k, None)
        else:
            acc[k] = nv


def vec_is_zero(vec: dict) -> bool:
    return not vec


def vec_from_dense(field, xs) -> dict:
    return {i: v for i, v in enumerate(xs) if not field.is_zero(v)}


def vec_to_dense(field, vec: dict, n: int) -> list:
    out = [field.zero] * n
    for k, v in vec.items():
        out[k] = v
    return out


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Sparse rows x cols matrix; duplicate (r, c) entries are summed."""

    def __init__(self, field, nrows, ncols, rows, cols, vals):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self._r = rows          # np.int64 array
        self._c = cols          # np.int64 array
        self._v = vals          # list of raw values, or np.uint16 codes
        self._coded = isinstance(vals, np.ndarray)
        self._by_col = None

    @property
    def nnz(self) -> int:
        return len(self._r)

    def iter_entries(self):
        f = self.field
        if self._coded:
            for r, c, v in zip(self._r, self._c, self._v):
                yield int(r), int(c), f.decode(int(v))
        else:
            for r, c, v in zip(self._r, self._c, self._v):
                yield int(r), int(c), v

    def _ensure_by_col(self):
        if self._by_col is None:
            order = np.argsort(self._c, kind="stable")
            sorted_c = self._c[order]
            starts = np.searchsorted(sorted_c, np.arange(self.ncols + 1))
            self._by_col = (order, starts)

    def matvec(self, x: dict) -> dict:
        """y = M x for a sparse coordinate vector x."""
        f = self.field
        self._ensure_by_col()
        order, starts = self._by_col
        out: dict = {}
        for c, xv in x.items():
            for k in order[starts[c]:starts[c + 1]]:
                r = int(self._r[k])
                v = f.decode(int(self._v[k])) if self._coded else self._v[k]
                nv = f.add(out.get(r, f.zero), f.mul(v, xv))
                if f.is_zero(nv):
                    out.pop(r, None)
                else:
                    out[r] = nv
        return out

    def column(self, c: int) -> dict:
        self._ensure_by_col()
        order, starts = self._by_col
        f = self.field
        out: dict = {}
        for k in order[starts[c]:starts[c + 1]]:
            r = int(self._r[k])
            v = f.decode(int(self._v[k])) if self._coded else self._v[k]
            nv = f.add(out.get(r, f.zero), v)
            if f.is_zero(nv):
                out.pop(r, None)
            else:
                out[r] = nv
        return out

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.ncols, self.nrows, self._c, self._r, self._v)

    def rows_as_dicts(self):
        f = self.field
        rows = [dict() for _ in range(self.nrows)]
        for r, c, v in self.iter_entries():
            nv = f.add(rows[r].get(c, f.zero), v)
            if f.is_zero(nv):
                rows[r].pop(c, None)
            else:
                rows[r][c] = nv
        return rows

    def to_dense(self):
        f = self.field
        out = [[f.zero] * self.ncols for _ in range(self.nrows)]
        for r, c, v in self.iter_entries():
            out[r][c] = f.add(out[r][c], v)
        return out

    def compose(self, other: "Matrix") -> "Matrix":
        """self @ other (small matrices)."""
        assert self.ncols == other.nrows
        f = self.field
        brows = other.rows_as_dicts()
        acc: dict = {}
        for r, k, v in self.iter_entries():
            for c, w in brows[k].items():
                key = (r, c)
                nv = f.add(acc.get(key, f.zero), f.mul(v, w))
                if f.is_zero(nv):
                    acc.pop(key, None)
                else:
                    acc[key] = nv
        b = MatrixBuilder(f, self.nrows, other.ncols)
        for (r, c), v in acc.items():
            b.add(r, c, v)
        return b.build()

    def is_zero(self) -> bool:
        f = self.field
        acc: dict = {}
        for r, c, v in self.iter_entries():
            key = (r, c)
            nv = f.add(acc.get(key, f.zero), v)
            if f.is_zero(nv):
                acc.pop(key, None)
            else:
                acc[key] = nv
        return not acc

    @staticmethod
    def from_dense(field, rows) -> "Matrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        b = MatrixBuilder(field, nrows, ncols)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                b.add(i, j, v)
        return b.build()

    @staticmethod
    def identity(field, n) -> "Matrix":
        b = MatrixBuilder(field, n, n)
        for i in range(n):
            b.add(i, i, field.one)
        return b.build()

    @staticmethod
    def zero(field, nrows, ncols) -> "Matrix":
        return MatrixBuilder(field, nrows, ncols).build()

    def add(self, other: "Matrix") -> "Matrix":
        assert self.nrows == other.nrows and self.ncols == other.ncols
        b = MatrixBuilder(self.field, self.nrows, self.ncols)
        for r, c, v in self.iter_entries():
            b.add(r, c, v)
        for r, c, v in other.iter_entries():
            b.add(r, c, v)
        return b.build()

    def scale(self, c) -> "Matrix":
        b = MatrixBuilder(self.field, self.nrows, self.ncols)
        for r, cc, v in self.iter_entries():
            b.add(r, cc, self.field.mul(c, v))
        return b.build()


class MatrixBuilder:
    def __init__(self, field, nrows, ncols, budget=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.budget = budget
        self._rows = []
        self._cols = []
        self._vals = []
        self._coded = field.size is not None and field.size <= 65535

    def add(self, r, c, v):
        if self.field.is_zero(v):
            return
        self._rows.append(r)
        self._cols.append(c)
        self._vals.append(self.field.code(v) if self._coded else v)
        if self.budget is not None and len(self._rows) > self.budget:
            from .errors import BudgetExceeded

            raise BudgetExceeded(
                f"matrix nonzero count exceeded budget {self.budget}")

    @property
    def count(self):
        return len(self._rows)

    def build(self) -> Matrix:
        rows = np.array(self._rows, dtype=np.int64)
        cols = np.array(self._cols, dtype=np.int64)
        vals = (np.array(self._vals, dtype=np.uint16)
                if self._coded else self._vals)
        return Matrix(self.field, self.nrows, self.ncols, rows, cols, vals)


# ---------------------------------------------------------------------------
# dense reduced row echelon with optional augmentation


def rref(field, rows, track=False):
    """Reduced row echelon of dense rows.

    Returns (reduced_rows, pivot_cols) and, with track=True, also the
    transform T with reduced = T @ input (rows of T index the input rows).
    """
    f = field
    work = [list(r) for r in rows]
    n = len(work)
    ncols = len(work[0]) if n else 0
    trans = [[f.one if i == j else f.zero for j in range(n)] for i in range(n)] if track else None
    pivots = []
    prow = 0
    for col in range(ncols):
        sel = None
        for i in range(prow, n):
            if not f.is_zero(work[i][col]):
                sel = i
                break
        if sel is None:
            continue
        work[prow], work[sel] = work[sel], work[prow]
        if track:
            trans[prow], trans[sel] = trans[sel], trans[prow]
        inv = f.inv(work[prow][col])
        work[prow] = [f.mul(inv, x) for x in work[prow]]
        if track:
            trans[prow] = [f.mul(inv, x) for x in trans[prow]]
        for i in range(n):
            if i != prow and not f.is_zero(work[i][col]):
                c = work[i][col]
                work[i] = [f.sub(x, f.mul(c, y)) for x, y in zip(work[i], work[prow])]
                if track:
                    trans[i] = [f.sub(x, f.mul(c, y)) for x, y in zip(trans[i], trans[prow])]
        pivots.append(col)
        prow += 1
        if prow == n:
            break
    if track:
        return work[:prow], pivots, trans[:prow]
    return work[:prow], pivots


class Subspace:
    """Subspace of k^n held as canonical RREF basis rows (dense)."""

    def __init__(self, field, ambient_dim, rows=()):
        self.field = field
        self.ambient_dim = ambient_dim
        dense = [vec_to_dense(field, r, ambient_dim) if isinstance(r, dict) else list(r)
                 for r in rows]
        dense = [r for r in dense if any(not field.is_zero(x) for x in r)]
        if dense:
            self.basis, self.pivots = rref(field, dense)
        else:
            self.basis, self.pivots = [], []

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, vec):
        """Residual of a dense vector modulo the subspace."""
        f = self.field
        v = list(vec)
        for row, p in zip(self.basis, self.pivots):
            c = v[p]
            if not f.is_zero(c):
                v = [f.sub(x, f.mul(c, y)) for x, y in zip(v, row)]
        return v

    def coords_of(self, vec):
        """Coordinates in the basis, or None if vec is outside the subspace."""
        f = self.field
        v = list(vec)
        coords = []
        for row, p in zip(self.basis, self.pivots):
            c = v[p]
            coords.append(c)
            if not f.is_zero(c):
                v = [f.sub(x, f.mul(c, y)) for x, y in zip(v, row)]
        if any(not f.is_zero(x) for x in v):
            return None
        return coords

    def contains(self, vec) -> bool:
        return self.coords_of(vec) is not None

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(r) for r in other.basis)

    def lift(self, coords):
        f = self.field
        out = [f.zero] * self.ambient_dim
        for c, row in zip(coords, self.basis):
            if not f.is_zero(c):
                out = [f.add(x, f.mul(c, y)) for x, y in zip(out, row)]
        return out

    def __eq__(self, other):
        return (isinstance(other, Subspace)
                and self.ambient_dim == other.ambient_dim
                and self.pivots == other.pivots
                and self.basis == other.basis)


def full_space(field, n) -> Subspace:
    eye = [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]
    return Subspace(field, n, eye)


# ---------------------------------------------------------------------------
# rank / kernel / image / solve


_DENSE_LIMIT = 400_000  # nrows * ncols below this goes through dense paths


def _echelon_of_rows(field, row_dicts, space_dim):
    ech = new_echelon(field, space_dim)
    for r in row_dicts:
        ech.add_row_dict(r)
    return ech


def rank(M: Matrix) -> int:
    if M.nrows == 0 or M.ncols == 0:
        return 0
    # echelonize over the smaller of the two orientations
    if M.nrows <= M.ncols:
        ech = _echelon_of_rows(M.field, M.rows_as_dicts(), M.ncols)
    else:
        ech = _echelon_of_rows(M.field, M.transpose().rows_as_dicts(), M.nrows)
    return ech.rank


def kernel(M: Matrix) -> Subspace:
    """Right kernel {x : Mx = 0} as a subspace of k^ncols."""
    if M.ncols == 0:
        return Subspace(M.field, 0)
    if M.nrows == 0:
        return full_space(M.field, M.ncols)
    ech = _echelon_of_rows(M.field, M.rows_as_dicts(), M.ncols)
    piv = set(int(c) for c in ech.pivot_cols())
    vecs = [ech.kernel_vector(c) for c in range(M.ncols) if c not in piv]
    return Subspace(M.field, M.ncols, vecs)


def image(M: Matrix) -> Subspace:
    """Column space as a subspace of k^nrows."""
    cols = M.transpose().rows_as_dicts()
    return Subspace(M.field, M.nrows, cols)


def solve(M: Matrix, b) -> list | None:
    """Some x with Mx = b, or None when inconsistent.  Dense path."""
    f = M.field
    if isinstance(b, dict):
        b = vec_to_dense(f, b, M.nrows)
    dense = M.to_dense()
    aug = [row + [bv] for row, bv in zip(dense, b)]
    red, pivots = rref(f, aug)
    x = [f.zero] * M.ncols
    for row, p in zip(red, pivots):
        if p == M.ncols:
            return None          # pivot in the augmented column
        x[p] = row[-1]
    return x


class Quotient:
    """Basis of V/W with lifted representatives and a projection map."""

    def __init__(self, field, V: Subspace, W: Subspace):
        if not V.contains_space(W):
            raise NotASubspace("W is not contained in V")
        self.field = field
        self.V, self.W = V, W
        f = field
        n = V.ambient_dim
        reps = []
        # augmented rows: [vector | coefficients over chosen representatives]
        self._rows = [(list(r), []) for r in W.basis]
        for v in V.basis:
            res, coords = self._reduce_aug(v)
            if any(not f.is_zero(x) for x in res):
                reps.append(list(v))
                # res == v - sum(coords[i] * rep_i) mod W, so the stored tag
                # must carry -coords plus 1 on the new representative
                tag = [f.neg(c) for c in coords] + [f.one]
                self._rows.append((res, tag))
        self.reps = reps
        self.dim = len(reps)

    def _reduce_aug(self, vec):
        f = self.field
        v = list(vec)
        coeffs = {}
        for idx, (row, tag) in enumerate(self._rows):
            p = _lead_index(f, row)
            if p is None:
                continue
            c = f.div(v[p], row[p])
            if not f.is_zero(c):
                v = [f.sub(x, f.mul(c, y)) for x, y in zip(v, row)]
                for i, t in enumerate(tag):
                    coeffs[i] = f.add(coeffs.get(i, f.zero), f.mul(c, t))
        out = [coeffs.get(i, f.zero) for i in range(self.dim_so_far())]
        return v, out

    def dim_so_far(self):
        return max((len(tag) for _, tag in self._rows), default=0)

    def project(self, vec):
        """Coordinates of the class of vec in the chosen representatives."""
        f = self.field
        res, coords = self._reduce_aug(list(vec))
        if any(not f.is_zero(x) for x in res):
            raise NotASubspace("vector not in V")
        coords += [f.zero] * (self.dim - len(coords))
        return coords


def _lead_index(field, row):
    for i, x in enumerate(row):
        if not field.is_zero(x):
            return i
    return None


def quotient_basis(V: Subspace, W: Subspace):
    """Representatives of V/W plus the projection map V -> coordinates."""
    q = Quotient(V.field, V, W)
    return q.reps, q.project


# ---------------------------------------------------------------------------
# characteristic polynomial (Berkowitz, division-free) and eigenspaces


def char_poly(M: Matrix):
    """Coefficients of det(xI - M), low degree first."""
    f = M.field
    a = M.to_dense()
    n = M.nrows
    assert M.nrows == M.ncols, "char_poly needs a square matrix"
    vec = _berkowitz(f, a, n)
    return list(reversed(vec))      # leading-first -> low-to-high


def _berkowitz(f, a, n):
    if n == 0:
        return [f.one]
    if n == 1:
        return [f.one, f.neg(a[0][0])]
    diag = a[0][0]
    R = a[0][1:]
    C = [a[i][0] for i in range(1, n)]
    A = [row[1:] for row in a[1:]]
    sub = _berkowitz(f, A, n - 1)
    # first column of the Toeplitz factor: 1, -a, -R C, -R A C, -R A^2 C, ...
    tcol = [f.one, f.neg(diag)]
    w = C
    for _ in range(n - 1):
        dot = f.sum(f.mul(x, y) for x, y in zip(R, w))
        tcol.append(f.neg(dot))
        w = [f.sum(f.mul(A[i][j], w[j]) for j in range(n - 1)) for i in range(n - 1)]
    out = []
    for k in range(n + 1):
        acc = f.zero
        for j in range(len(sub)):
            i = k - j
            if 0 <= i < len(tcol):
                acc = f.add(acc, f.mul(tcol[i], sub[j]))
        out.append(acc)
    return out


def eigenspaces(M: Matrix):
    """[(eigenvalue in the field, eigenspace)] plus a diagonalizable flag."""
    from .field import all_roots

    f = M.field
    cp = char_poly(M)
    roots = all_roots(f, cp)
    out = []
    total = 0
    for lam, _mult in roots:
        shifted = M.add(Matrix.identity(f, M.nrows).scale(f.neg(lam)))
        ker = kernel(shifted)
        out.append((lam, ker))
        total += ker.dim
    return out, total == M.nrows


def compose_is_zero(A: Matrix, B: Matrix) -> bool:
    """Check A @ B == 0 without building the product densely."""
    f = A.field
    cols = B.transpose().rows_as_dicts()
    return all(vec_is_zero(A.matvec(col)) for col in cols)
