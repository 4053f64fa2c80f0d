"""Finite dimensional algebras, bimodules, and Frobenius structure.

Elements are dense coordinate lists over a fixed basis.  The quiver preset
builds the truncated cyclic path algebras kQ/R^N with basis ordered by path
length then start vertex, matching the usual (e_1..e_s, a_1..a_s, ...) order.
"""

from __future__ import annotations

from . import linalg
from .errors import (DegenerateForm, InvalidPresentation, NonAssociative,
                     NotAutomorphism, NotDiagonalizable)
from .field import make_field
from .linalg import Matrix, Subspace, full_space


class FiniteDimAlgebra:
    """Structure-constant algebra: basis_i * basis_j = sum_k mult[i][j][k]."""

    def __init__(self, field, labels, mult, unit, check=True):
        self.field = field
        self.dim = len(labels)
        self.labels = list(labels)
        self.mult = mult                      # mult[i][j] = [(k, coeff), ...]
        self.unit = list(unit)                # dense coords of 1_A
        if check:
            self._check_unit()
            self._check_associative()

    def basis_vector(self, i):
        f = self.field
        v = [f.zero] * self.dim
        v[i] = f.one
        return v

    def mul_basis(self, i, j):
        return self.mult[i][j]

    def multiply(self, x, y):
        """Product of two dense coordinate vectors."""
        f = self.field
        out = [f.zero] * self.dim
        for i, xi in enumerate(x):
            if f.is_zero(xi):
                continue
            for j, yj in enumerate(y):
                if f.is_zero(yj):
                    continue
                c = f.mul(xi, yj)
                for k, coeff in self.mult[i][j]:
                    out[k] = f.add(out[k], f.mul(c, coeff))
        return out

    def left_mult_matrix(self, x) -> Matrix:
        f = self.field
        b = linalg.MatrixBuilder(f, self.dim, self.dim)
        for i, xi in enumerate(x):
            if f.is_zero(xi):
                continue
            for j in range(self.dim):
                for k, coeff in self.mult[i][j]:
                    b.add(k, j, f.mul(xi, coeff))
        return b.build()

    def right_mult_matrix(self, x) -> Matrix:
        f = self.field
        b = linalg.MatrixBuilder(f, self.dim, self.dim)
        for j, xj in enumerate(x):
            if f.is_zero(xj):
                continue
            for i in range(self.dim):
                for k, coeff in self.mult[i][j]:
                    b.add(k, i, f.mul(xj, coeff))
        return b.build()

    def _check_unit(self):
        f = self.field
        for i in range(self.dim):
            b = self.basis_vector(i)
            if self.multiply(self.unit, b) != b or self.multiply(b, self.unit) != b:
                raise NonAssociative(f"unit fails on basis {self.labels[i]}")

    def _check_associative(self):
        f = self.field
        for i in range(self.dim):
            bi = self.basis_vector(i)
            for j in range(self.dim):
                bij = self.multiply(bi, self.basis_vector(j))
                for k in range(self.dim):
                    bk = self.basis_vector(k)
                    left = self.multiply(bij, bk)
                    right = self.multiply(bi, self.multiply(self.basis_vector(j), bk))
                    if left != right:
                        raise NonAssociative(
                            f"associativity fails at ({self.labels[i]}, "
                            f"{self.labels[j]}, {self.labels[k]})")

    def center(self) -> Subspace:
        """Brute-force commutant: {z : zb = bz for all basis b}."""
        f = self.field
        rows = []
        for i in range(self.dim):
            b = self.basis_vector(i)
            L = self.left_mult_matrix(b)
            R = self.right_mult_matrix(b)
            diff = L.add(R.scale(f.neg(f.one)))
            rows.append(diff)
        big = linalg.MatrixBuilder(f, self.dim * self.dim, self.dim)
        r0 = 0
        for diff in rows:
            for r, c, v in diff.iter_entries():
                big.add(r0 + r, c, v)
            r0 += self.dim
        return linalg.kernel(big.build())

    def commutator_space(self) -> Subspace:
        """Span of all xy - yx for basis pairs."""
        f = self.field
        vecs = []
        for i in range(self.dim):
            for j in range(self.dim):
                bi, bj = self.basis_vector(i), self.basis_vector(j)
                d = [f.sub(a, b) for a, b in
                     zip(self.multiply(bi, bj), self.multiply(bj, bi))]
                vecs.append(d)
        return Subspace(f, self.dim, vecs)


def algebra_from_structure_constants(field, labels, table, unit) -> FiniteDimAlgebra:
    """table[i][j] is the dense product vector of basis_i * basis_j."""
    f = field
    d = len(labels)
    mult = [[[(k, v) for k, v in enumerate(row) if not f.is_zero(v)]
             for row in table[i]] for i in range(d)]
    return FiniteDimAlgebra(f, labels, mult, unit)


class QuiverPresentation:
    """Cyclic Nakayama quiver on s vertices with relations R^N = 0."""

    def __init__(self, vertices: int, radical_power: int):
        if vertices < 1 or radical_power < 2:
            raise InvalidPresentation("need s >= 1 and N >= 2")
        self.s = vertices
        self.N = radical_power


def nakayama_algebra(field, s: int, N: int) -> FiniteDimAlgebra:
    """kQ/R^N for the oriented cycle; basis path(v, l) at index l*s + v.

    path(v, l) starts at vertex v (0-based) and has length l < N; the arrow
    a_v runs v -> v+1, so path(v, l) = a_v a_{v+1} ... a_{v+l-1}.
    """
    QuiverPresentation(s, N)
    f = field
    d = s * N
    labels = []
    for l in range(N):
        for v in range(s):
            if l == 0:
                labels.append(f"e{v + 1}")
            else:
                labels.append("".join(f"a{((v + t) % s) + 1}" for t in range(l)))
    mult = [[[] for _ in range(d)] for _ in range(d)]
    for l1 in range(N):
        for v1 in range(s):
            i = l1 * s + v1
            for l2 in range(N):
                for v2 in range(s):
                    j = l2 * s + v2
                    if (v1 + l1) % s == v2 and l1 + l2 < N:
                        k = (l1 + l2) * s + v1
                        mult[i][j] = [(k, f.one)]
    unit = [f.zero] * d
    for v in range(s):
        unit[v] = f.one
    alg = FiniteDimAlgebra(f, labels, mult, unit)
    alg.quiver = QuiverPresentation(s, N)
    return alg


def build_algebra(spec_obj: dict, field) -> FiniteDimAlgebra:
    """Construct an algebra from its JSON description."""
    t = spec_obj.get("type")
    if t == "nakayama":
        return nakayama_algebra(field, int(spec_obj["vertices"]),
                                int(spec_obj["radical_power"]))
    if t == "structure_constants":
        labels = spec_obj["labels"]
        parse = field.parse
        table = [[[parse(v) if isinstance(v, str) else
                   (field.parse(v) if isinstance(v, list) else field.from_int(v))
                   for v in row] for row in mat] for mat in spec_obj["table"]]
        unit = [parse(v) if isinstance(v, str) else field.from_int(v)
                for v in spec_obj["unit"]]
        return algebra_from_structure_constants(field, labels, table, unit)
    raise InvalidPresentation(f"unknown algebra type {t!r}")


class Bimodule:
    """Left and right action matrices indexed by the algebra basis."""

    def __init__(self, algebra: FiniteDimAlgebra, dim: int, left, right, check=True):
        self.algebra = algebra
        self.dim = dim
        self.left = left        # list of Matrix, one per algebra basis index
        self.right = right
        if check:
            self._check()

    def _check(self):
        A = self.algebra
        f = A.field
        # unital
        uL = _action_of(self, self.left, A.unit)
        uR = _action_of(self, self.right, A.unit)
        eye = Matrix.identity(f, self.dim)
        if not uL.add(eye.scale(f.neg(f.one))).is_zero():
            raise NonAssociative("left action not unital")
        if not uR.add(eye.scale(f.neg(f.one))).is_zero():
            raise NonAssociative("right action not unital")
        # L(a)L(b) = L(ab), R(b)R(a) = R(ab), and the two actions commute
        for i in range(A.dim):
            for j in range(A.dim):
                ab = A.multiply(A.basis_vector(i), A.basis_vector(j))
                Lab = _action_of(self, self.left, ab)
                if not self.left[i].compose(self.left[j]).add(
                        Lab.scale(f.neg(f.one))).is_zero():
                    raise NonAssociative("left action not multiplicative")
                Rab = _action_of(self, self.right, ab)
                if not self.right[j].compose(self.right[i]).add(
                        Rab.scale(f.neg(f.one))).is_zero():
                    raise NonAssociative("right action not multiplicative")
                comm = self.left[i].compose(self.right[j]).add(
                    self.right[j].compose(self.left[i]).scale(f.neg(f.one)))
                if not comm.is_zero():
                    raise NonAssociative("left/right actions do not commute")

    def apply_left(self, a_coords, m):
        """(a . m) for dense algebra coords a and dense module vector m."""
        f = self.algebra.field
        out = [f.zero] * self.dim
        for i, ai in enumerate(a_coords):
            if f.is_zero(ai):
                continue
            col = self.left[i].matvec(linalg.vec_from_dense(f, m))
            for r, v in col.items():
                out[r] = f.add(out[r], f.mul(ai, v))
        return out

    def apply_right(self, m, a_coords):
        f = self.algebra.field
        out = [f.zero] * self.dim
        for i, ai in enumerate(a_coords):
            if f.is_zero(ai):
                continue
            col = self.right[i].matvec(linalg.vec_from_dense(f, m))
            for r, v in col.items():
                out[r] = f.add(out[r], f.mul(ai, v))
        return out


def _action_of(bim, mats, coords):
    f = bim.algebra.field
    out = Matrix.zero(f, bim.dim, bim.dim)
    for i, c in enumerate(coords):
        if not f.is_zero(c):
            out = out.add(mats[i].scale(c))
    return out


def regular_bimodule(A: FiniteDimAlgebra) -> Bimodule:
    left = [A.left_mult_matrix(A.basis_vector(i)) for i in range(A.dim)]
    right = [A.right_mult_matrix(A.basis_vector(i)) for i in range(A.dim)]
    return Bimodule(A, A.dim, left, right, check=False)


def twisted_bimodule(A: FiniteDimAlgebra, sigma: Matrix, check=True) -> Bimodule:
    """A_sigma: a.m.b = a m sigma(b)."""
    if check:
        _check_automorphism(A, sigma)
    f = A.field
    left = [A.left_mult_matrix(A.basis_vector(i)) for i in range(A.dim)]
    right = []
    for i in range(A.dim):
        sb = linalg.vec_to_dense(f, sigma.matvec({i: f.one}), A.dim)
        right.append(A.right_mult_matrix(sb))
    return Bimodule(A, A.dim, left, right, check=False)


def _check_automorphism(A: FiniteDimAlgebra, sigma: Matrix):
    f = A.field
    if linalg.rank(sigma) != A.dim:
        raise NotAutomorphism("sigma is not invertible")
    img_unit = linalg.vec_to_dense(
        f, sigma.matvec(linalg.vec_from_dense(f, A.unit)), A.dim)
    if img_unit != A.unit:
        raise NotAutomorphism("sigma(1) != 1")
    for i in range(A.dim):
        si = linalg.vec_to_dense(f, sigma.matvec({i: f.one}), A.dim)
        for j in range(A.dim):
            sj = linalg.vec_to_dense(f, sigma.matvec({j: f.one}), A.dim)
            prod = A.multiply(A.basis_vector(i), A.basis_vector(j))
            sprod = linalg.vec_to_dense(
                f, sigma.matvec(linalg.vec_from_dense(f, prod)), A.dim)
            if sprod != A.multiply(si, sj):
                raise NotAutomorphism(
                    f"sigma(xy) != sigma(x)sigma(y) at ({A.labels[i]}, {A.labels[j]})")


class FrobeniusStructure:
    """Bilinear form data: gram, dual bases, Nakayama automorphism."""

    def __init__(self, algebra: FiniteDimAlgebra, gram_rows):
        self.algebra = algebra
        f = algebra.field
        self.gram = [list(r) for r in gram_rows]
        d = algebra.dim
        gram_matrix = Matrix.from_dense(f, self.gram)
        if linalg.rank(gram_matrix) != d:
            raise DegenerateForm("Gram matrix is singular")
        # dual_v[i] solves <v_i, u_j> = delta_ij with u_j the algebra basis
        eye = [[f.one if i == j else f.zero for j in range(d)] for i in range(d)]
        self.dual_u = eye
        self.dual_v = _invert_dense(f, self.gram)
        self.nu = self._nakayama_matrix()
        self.nu_inv = self._nakayama_inv_matrix()
        self._eigen = None

    def form(self, x, y):
        f = self.algebra.field
        acc = f.zero
        for i, xi in enumerate(x):
            if f.is_zero(xi):
                continue
            row = self.gram[i]
            for j, yj in enumerate(y):
                if not f.is_zero(yj):
                    acc = f.add(acc, f.mul(f.mul(xi, yj), row[j]))
        return acc

    def _nakayama_matrix(self) -> Matrix:
        # nu(x) = sum_i <x, v_i> u_i
        f = self.algebra.field
        d = self.algebra.dim
        cols = []
        for j in range(d):
            x = self.algebra.basis_vector(j)
            out = [f.zero] * d
            for i in range(d):
                c = self.form(x, self.dual_v[i])
                if not f.is_zero(c):
                    for k, uk in enumerate(self.dual_u[i]):
                        out[k] = f.add(out[k], f.mul(c, uk))
            cols.append(out)
        return Matrix.from_dense(f, [[cols[j][i] for j in range(d)] for i in range(d)])

    def _nakayama_inv_matrix(self) -> Matrix:
        # nu_inv(x) = sum_i <u_i, x> v_i
        f = self.algebra.field
        d = self.algebra.dim
        cols = []
        for j in range(d):
            x = self.algebra.basis_vector(j)
            out = [f.zero] * d
            for i in range(d):
                c = self.form(self.dual_u[i], x)
                if not f.is_zero(c):
                    for k, vk in enumerate(self.dual_v[i]):
                        out[k] = f.add(out[k], f.mul(c, vk))
            cols.append(out)
        return Matrix.from_dense(f, [[cols[j][i] for j in range(d)] for i in range(d)])

    def eigen(self):
        if self._eigen is None:
            self._eigen = EigenData(self)
        return self._eigen


class EigenData:
    """Eigendecomposition of nu with unit-first basis and dual eigenbasis."""

    def __init__(self, frob: FrobeniusStructure):
        A = frob.algebra
        f = A.field
        self.frob = frob
        spaces, diag = linalg.eigenspaces(frob.nu)
        self.diagonalizable = diag
        raw = {lam: sp for lam, sp in spaces}
        self.eigenvalues = _order_eigenvalues(f, [lam for lam, _ in spaces])
        self.spaces = [raw[lam] for lam in self.eigenvalues]
        if not diag:
            return
        # concatenated eigenbasis; unit goes first inside the lambda=1 block
        one = f.one
        basis = []
        self.lam_of_vec = []
        for lam, sp in zip(self.eigenvalues, self.spaces):
            block = list(sp.basis)
            if lam == one:
                assert sp.contains(A.unit), "unit must lie in the 1-eigenspace"
                stacked = Subspace(f, A.dim, [A.unit])
                chosen = [list(A.unit)]
                for row in block:
                    if not stacked.contains(row):
                        stacked = Subspace(f, A.dim, stacked.basis + [row])
                        chosen.append(list(row))
                block = chosen
            for row in block:
                basis.append(list(row))
                self.lam_of_vec.append(lam)
        self.basis = basis                      # rows: eigenvectors in std coords
        self.basis_inv = _invert_dense(f, _transpose_dense(basis))
        # dual basis w.r.t. the form: rows v_i with <v_i, basis_j> = delta_ij
        B = [[frob.form(_unit_vec(f, A.dim, k), basis[j]) for j in range(A.dim)]
             for k in range(A.dim)]
        self.dual = _transpose_dense(_invert_dense(f, _transpose_dense(B)))
        # component monoid: multiplicative closure of the eigenvalues
        self.group = _closure(f, self.eigenvalues)
        self.group_index = {v: i for i, v in enumerate(self.group)}
        g = len(self.group)
        self.group_mul = [[self.group_index[f.mul(a, b)] for b in self.group]
                          for a in self.group]
        self.group_inv = [self.group_index[f.inv(a)] for a in self.group]
        self.comp_of_vec = [self.group_index[lam] for lam in self.lam_of_vec]

    def to_eigen(self, x):
        """Standard coords -> eigenbasis coords."""
        f = self.frob.algebra.field
        return _mat_vec_dense(f, self.basis_inv, x)

    def from_eigen(self, y):
        f = self.frob.algebra.field
        return _mat_vec_dense(f, _transpose_dense(self.basis), y)


def _order_eigenvalues(f, lams):
    one = f.one
    def key(v):
        return f.code(v) if f.size is not None else (v.denominator, v.numerator)
    rest = sorted((v for v in lams if v != one), key=key)
    return ([one] if one in lams else []) + rest


def _closure(f, gens):
    seen = [f.one]
    seen_set = {f.one}
    frontier = list(seen)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                v = f.mul(a, g)
                if v not in seen_set:
                    seen_set.add(v)
                    seen.append(v)
                    nxt.append(v)
        frontier = nxt
        if len(seen) > 4096:
            raise NotDiagonalizable("eigenvalue monoid closure too large")
    def key(v):
        return f.code(v) if f.size is not None else (v.denominator, v.numerator)
    return [f.one] + sorted((v for v in seen if v != f.one), key=key)


def _unit_vec(f, n, k):
    v = [f.zero] * n
    v[k] = f.one
    return v


def _transpose_dense(rows):
    return [list(col) for col in zip(*rows)]


def _invert_dense(f, rows):
    n = len(rows)
    aug = [list(r) + [f.one if i == j else f.zero for j in range(n)]
           for i, r in enumerate(rows)]
    red, pivots = linalg.rref(f, aug)
    if pivots != list(range(n)):
        raise DegenerateForm("matrix not invertible")
    return [r[n:] for r in red]


def _mat_vec_dense(f, rows, x):
    out = []
    for r in rows:
        acc = f.zero
        for a, b in zip(r, x):
            if not (f.is_zero(a) or f.is_zero(b)):
                acc = f.add(acc, f.mul(a, b))
        out.append(acc)
    return out


def socle_trace_form(A: FiniteDimAlgebra, socle_indices=None) -> FrobeniusStructure:
    """<a, b> = tr(ab) with tr = sum of coordinates over the socle basis."""
    f = A.field
    if socle_indices is None:
        q = getattr(A, "quiver", None)
        if q is None:
            raise DegenerateForm("socle indices required for raw algebras")
        socle_indices = [(q.N - 1) * q.s + v for v in range(q.s)]
    socle = set(socle_indices)

    def tr(x):
        return f.sum(x[i] for i in socle)

    d = A.dim
    gram = [[tr(A.multiply(A.basis_vector(i), A.basis_vector(j)))
             for j in range(d)] for i in range(d)]
    return FrobeniusStructure(A, gram)


def norm_map(frob: FrobeniusStructure, M: Bimodule) -> Matrix:
    """mu(m) = sum_i u_i m v_i via the bimodule actions."""
    A = frob.algebra
    f = A.field
    out = Matrix.zero(f, M.dim, M.dim)
    for i in range(A.dim):
        L = _action_of(M, M.left, frob.dual_u[i])
        R = _action_of(M, M.right, frob.dual_v[i])
        out = out.add(L.compose(R))
    return out


def casimir_element(frob: FrobeniusStructure, u_rows=None, v_rows=None):
    """sum_i u_i (x) v_i as a dense d*d coordinate table."""
    A = frob.algebra
    f = A.field
    us = u_rows if u_rows is not None else frob.dual_u
    vs = v_rows if v_rows is not None else frob.dual_v
    d = A.dim
    out = [[f.zero] * d for _ in range(d)]
    for u, v in zip(us, vs):
        for a, ua in enumerate(u):
            if f.is_zero(ua):
                continue
            for b, vb in enumerate(v):
                if not f.is_zero(vb):
                    out[a][b] = f.add(out[a][b], f.mul(ua, vb))
    return out
