"""Bar-resolution complexes: Hochschild cochains/chains, the complete
complex splicing them through the norm map, eigencomponent subcomplexes,
coefficient modules (including the syzygy bimodules), and Theta duality.

All complexes are laid out over one chosen basis of A per context: the
concatenated nu-eigenbasis when the Nakayama automorphism is diagonalizable
(components of tensor indices are then pure coordinate data), else the
algebra's own basis.  Degree-r cochain coordinates are (value index m,
input tuple t) at m * (d-1)^r + rank(t); chains use the same layout.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import linalg
from .errors import BudgetExceeded, DegreeOutOfWindow, NotDiagonalizable
from .linalg import Matrix, MatrixBuilder, Subspace

DEFAULT_BUDGET = 10 ** 7


class CoeffModule:
    """Coefficient bimodule in context coordinates.

    left/right actions are stored per reduced-basis index (action of the
    section representative) as sparse (out, in, coeff) triples; act() takes
    arbitrary algebra coordinate vectors.
    """

    def __init__(self, ctx, dim, left_abar, right_abar, act_left, act_right,
                 comp_of_vec=None, name=""):
        self.ctx = ctx
        self.dim = dim
        self.left_abar = left_abar
        self.right_abar = right_abar
        self.act_left = act_left        # (a_coords, m_dict) -> m_dict
        self.act_right = act_right
        self.comp_of_vec = comp_of_vec  # np.int64 array or None
        self.name = name


class BarContext:
    """Chosen-basis coordinate system plus cached product/projection tables."""

    def __init__(self, A, frob=None, use_eigen=None, budget=DEFAULT_BUDGET):
        self.A = A
        self.frob = frob
        self.field = A.field
        self.budget = budget
        f = A.field
        d = A.dim
        self.dim = d
        self.dm1 = d - 1
        eig = None
        if frob is not None:
            eig = frob.eigen()
        if use_eigen is None:
            use_eigen = bool(eig and eig.diagonalizable)
        if use_eigen and not (eig and eig.diagonalizable):
            raise NotDiagonalizable("eigen coordinates need diagonalizable nu")
        self.use_eigen = use_eigen
        self.eigen = eig if use_eigen else None

        if use_eigen:
            rows = eig.basis                      # chosen basis in std coords
            self._basis_mat = rows
            self._basis_inv = eig.basis_inv
            unit_c = eig.to_eigen(A.unit)
            self.lam = list(eig.lam_of_vec)
            self.comp_of_basis = np.array(eig.comp_of_vec, dtype=np.int64)
            self.group = eig.group
            self.gmul = np.array(eig.group_mul, dtype=np.int64)
            self.ginv = np.array(eig.group_inv, dtype=np.int64)
        else:
            rows = [A.basis_vector(i) for i in range(d)]
            self._basis_mat = rows
            self._basis_inv = rows
            unit_c = list(A.unit)
            self.lam = None
            self.comp_of_basis = None
            self.group = None
        self.unit_c = unit_c
        # pivot: coordinate dropped when passing to the reduced space
        self.pivot = next(i for i, c in enumerate(unit_c) if not f.is_zero(c))
        self.abar_to_a = [i for i in range(d) if i != self.pivot]
        self.a_to_abar = {a: k for k, a in enumerate(self.abar_to_a)}
        if self.comp_of_basis is not None:
            self.comp_of_abar = self.comp_of_basis[self.abar_to_a]
        else:
            self.comp_of_abar = None

        # structure constants in chosen coordinates
        self.mult_c = self._mult_in_chosen()
        # pi table: chosen basis vector -> reduced coordinates
        inv_up = f.inv(unit_c[self.pivot])
        self.pi_c = []
        for i in range(d):
            if i == self.pivot:
                self.pi_c.append([
                    (self.a_to_abar[j], f.neg(f.mul(inv_up, unit_c[j])))
                    for j in self.abar_to_a if not f.is_zero(unit_c[j])])
            else:
                self.pi_c.append([(self.a_to_abar[i], f.one)])
        # products of section representatives, in A coordinates
        self.secmult = [[self.mult_c[a][b] for b in self.abar_to_a]
                        for a in self.abar_to_a]
        # same products pushed through pi
        self.secmult_bar = [[self._pi_sparse(col) for col in row]
                            for row in self.secmult]
        if frob is not None:
            self._init_frobenius_tables()
        self._modules = {}
        self._complete = {}

    # -- basis plumbing ----------------------------------------------------

    def to_chosen(self, std_vec):
        f = self.field
        if not self.use_eigen:
            return list(std_vec)
        return self.eigen.to_eigen(std_vec)

    def to_standard(self, chosen_vec):
        f = self.field
        if not self.use_eigen:
            return list(chosen_vec)
        return self.eigen.from_eigen(chosen_vec)

    def _mult_in_chosen(self):
        A, f = self.A, self.field
        d = A.dim
        if not self.use_eigen:
            return A.mult
        rows = self._basis_mat
        out = [[None] * d for _ in range(d)]
        for i in range(d):
            for j in range(d):
                prod = A.multiply(rows[i], rows[j])
                cc = self.eigen.to_eigen(prod)
                out[i][j] = [(k, v) for k, v in enumerate(cc) if not f.is_zero(v)]
        return out

    def _pi_sparse(self, sparse_a):
        """pi of a sparse A-coordinate list, as reduced-coordinate list."""
        f = self.field
        acc = {}
        for i, c in sparse_a:
            for k, w in self.pi_c[i]:
                nv = f.add(acc.get(k, f.zero), f.mul(c, w))
                if f.is_zero(nv):
                    acc.pop(k, None)
                else:
                    acc[k] = nv
        return sorted(acc.items())

    def pi_coords(self, dense_a):
        f = self.field
        acc = {}
        for i, c in enumerate(dense_a):
            if f.is_zero(c):
                continue
            for k, w in self.pi_c[i]:
                nv = f.add(acc.get(k, f.zero), f.mul(c, w))
                if f.is_zero(nv):
                    acc.pop(k, None)
                else:
                    acc[k] = nv
        return acc

    def section_vec(self, abar_idx):
        f = self.field
        v = [f.zero] * self.dim
        v[self.abar_to_a[abar_idx]] = f.one
        return v

    def mul_sparse(self, xs, ys):
        """Product of two sparse A-coordinate lists."""
        f = self.field
        acc = {}
        for i, ci in xs:
            for j, cj in ys:
                c = f.mul(ci, cj)
                for k, w in self.mult_c[i][j]:
                    nv = f.add(acc.get(k, f.zero), f.mul(c, w))
                    if f.is_zero(nv):
                        acc.pop(k, None)
                    else:
                        acc[k] = nv
        return sorted(acc.items())

    def _init_frobenius_tables(self):
        f = self.field
        frob = self.frob
        d = self.dim
        if self.use_eigen:
            eig = self.eigen
            self.u_rows = [[f.one if i == j else f.zero for j in range(d)]
                           for i in range(d)]                  # chosen coords
            self.v_rows = [eig.to_eigen(v) for v in eig.dual]
            self.nu_diag = list(eig.lam_of_vec)
            self.nu_sparse = [[(i, lam)] for i, lam in enumerate(self.nu_diag)]
            self.nu_inv_sparse = [[(i, f.inv(lam))] for i, lam in enumerate(self.nu_diag)]
        else:
            self.u_rows = [list(r) for r in frob.dual_u]
            self.v_rows = [list(r) for r in frob.dual_v]
            nu_d = frob.nu.to_dense()
            nuinv_d = frob.nu_inv.to_dense()
            self.nu_sparse = [[(k, nu_d[k][j]) for k in range(d)
                               if not f.is_zero(nu_d[k][j])] for j in range(d)]
            self.nu_inv_sparse = [[(k, nuinv_d[k][j]) for k in range(d)
                                   if not f.is_zero(nuinv_d[k][j])] for j in range(d)]
        # gram in chosen coordinates and <x, 1> per basis vector
        rows = self._basis_mat
        self.gram_c = [[frob.form(rows[i], rows[j]) for j in range(d)]
                       for i in range(d)]
        unit_std = self.A.unit
        self.pair_one = [frob.form(rows[i], unit_std) for i in range(d)]
        # u_i in sparse chosen coords, v_i likewise
        self.u_sparse = [[(k, v) for k, v in enumerate(r) if not f.is_zero(v)]
                         for r in self.u_rows]
        self.v_sparse = [[(k, v) for k, v in enumerate(r) if not f.is_zero(v)]
                         for r in self.v_rows]

    def nu_apply_sparse(self, xs, power=1):
        f = self.field
        table = self.nu_sparse if power == 1 else self.nu_inv_sparse
        acc = {}
        for i, c in xs:
            for k, w in table[i]:
                nv = f.add(acc.get(k, f.zero), f.mul(c, w))
                if f.is_zero(nv):
                    acc.pop(k, None)
                else:
                    acc[k] = nv
        return sorted(acc.items())

    # -- coefficient modules ----------------------------------------------

    def regular_module(self) -> CoeffModule:
        return self._twisted(0)

    def twisted_module(self, nu_power: int) -> CoeffModule:
        """A_sigma with sigma = nu^power (power in {-1, 0, 1})."""
        return self._twisted(nu_power)

    def _twisted(self, power):
        if power in self._modules:
            return self._modules[power]
        f = self.field
        d = self.dim

        def row_action_table(p):
            out = []
            for k in range(self.dm1):
                a = self.abar_to_a[k]
                if p == 0:
                    cols = [(a, f.one)]
                else:
                    cols = self.nu_apply_sparse([(a, f.one)], p)
                triples = []
                for j, cj in cols:
                    for m in range(d):
                        for out_k, w in self.mult_c[m][j]:
                            triples.append((out_k, m, f.mul(cj, w)))
                out.append(triples)
            return out

        left = []
        for k in range(self.dm1):
            a = self.abar_to_a[k]
            triples = []
            for m in range(d):
                for out_k, w in self.mult_c[a][m]:
                    triples.append((out_k, m, w))
            left.append(triples)
        right = row_action_table(power)

        def act_left(a_coords, mvec):
            return self._act_mul(a_coords, mvec, left_side=True, power=0)

        def act_right(mvec, a_coords):
            return self._act_mul(a_coords, mvec, left_side=False, power=power)

        mod = CoeffModule(self, d, left, right, act_left, act_right,
                          comp_of_vec=(self.comp_of_basis if self.use_eigen else None),
                          name={0: "A", 1: "A_nu", -1: "A_nu_inv"}[power])
        self._modules[power] = mod
        return mod

    def _act_mul(self, a_coords, mvec, left_side, power):
        f = self.field
        a_sparse = [(i, c) for i, c in enumerate(a_coords) if not f.is_zero(c)]
        if power:
            a_sparse = self.nu_apply_sparse(a_sparse, power)
        m_sparse = sorted(mvec.items()) if isinstance(mvec, dict) else \
            [(i, c) for i, c in enumerate(mvec) if not f.is_zero(c)]
        if left_side:
            out = self.mul_sparse(a_sparse, m_sparse)
        else:
            out = self.mul_sparse(m_sparse, a_sparse)
        return dict(out)

    def module_from_actions(self, dim, left_mats, right_mats, name="") -> CoeffModule:
        """Module given by chosen-coordinate action matrices per basis index."""
        f = self.field

        def abar_table(mats):
            out = []
            for k in range(self.dm1):
                a = self.abar_to_a[k]
                triples = [(r, c, v) for r, c, v in mats[a].iter_entries()]
                out.append(triples)
            return out

        def make_act(mats, left_side):
            def act(a_coords, mvec=None):
                if left_side:
                    avec, m = a_coords, mvec
                else:
                    m, avec = a_coords, mvec
                acc = {}
                md = sorted(m.items()) if isinstance(m, dict) else \
                    [(i, c) for i, c in enumerate(m) if not f.is_zero(c)]
                for i, ci in enumerate(avec):
                    if f.is_zero(ci):
                        continue
                    col = mats[i].matvec(dict(md))
                    for r, v in col.items():
                        nv = f.add(acc.get(r, f.zero), f.mul(ci, v))
                        if f.is_zero(nv):
                            acc.pop(r, None)
                        else:
                            acc[r] = nv
                return acc
            return act

        return CoeffModule(self, dim, abar_table(left_mats), abar_table(right_mats),
                           make_act(left_mats, True),
                           lambda m, a: make_act(right_mats, False)(m, a),
                           comp_of_vec=None, name=name)

    # -- complexes ----------------------------------------------------------

    def tuple_count(self, r):
        return self.dm1 ** r

    def comp_of_tuples(self, r):
        """Component (group index) of each reduced tuple, vectorized."""
        n = self.tuple_count(r)
        comp = np.zeros(n, dtype=np.int64)
        if r == 0:
            return comp
        digits = np.arange(n, dtype=np.int64)
        for pos in range(r):
            digit = (digits // (self.dm1 ** (r - 1 - pos))) % self.dm1
            comp = self.gmul[comp, self.comp_of_abar[digit]]
        return comp

    def cochain_complex(self, module: CoeffModule, hi, budget=None):
        return BarCochainComplex(self, module, hi, budget or self.budget)

    def chain_complex(self, module: CoeffModule, hi, budget=None):
        return BarChainComplex(self, module, hi, budget or self.budget)

    def complete_complex(self, lo, hi, budget=None):
        key = (lo, hi)
        if key not in self._complete:
            self._complete[key] = CompleteComplex(self, lo, hi, budget or self.budget)
        return self._complete[key]

    # -- bar resolution / syzygy modules ------------------------------------

    def ambient_bar_dims(self, p):
        """Dimension of A (x) Abar^{p-1} (x) A; p >= 1."""
        return self.dim * self.tuple_count(p - 1) * self.dim

    def ambient_index(self, p, a, mid, b):
        return (a * self.tuple_count(p - 1) + mid) * self.dim + b

    def bar_differential(self, p, budget=None) -> Matrix:
        """d_p : A (x) Abar^p (x) A -> A (x) Abar^{p-1} (x) A (p >= 1)."""
        f = self.field
        d, dm1 = self.dim, self.dm1
        src = d * self.tuple_count(p) * d
        dst = self.ambient_bar_dims(p)
        bld = MatrixBuilder(f, dst, src, budget=budget or self.budget)
        pw = [dm1 ** k for k in range(p + 1)]
        for a in range(d):
            for t in itertools.product(range(dm1), repeat=p):
                tmid = sum(ti * pw[p - 1 - k] for k, ti in enumerate(t))
                for b in range(d):
                    col = (a * pw[p] + tmid) * d + b
                    # a * sec(t1) (x) rest (x) b
                    rest = tmid % pw[p - 1] if p >= 1 else 0
                    for k, c in self.mult_c[a][self.abar_to_a[t[0]]]:
                        bld.add(self.ambient_index(p, k, rest, b), col, c)
                    # interior contractions
                    for i in range(p - 1):
                        sgn = f.one if (i + 1) % 2 == 0 else f.neg(f.one)
                        for k, c in self.secmult_bar[t[i]][t[i + 1]]:
                            mid = 0
                            for pos in range(p - 1):
                                if pos < i:
                                    digit = t[pos]
                                elif pos == i:
                                    digit = k
                                else:
                                    digit = t[pos + 1]
                                mid = mid * dm1 + digit
                            bld.add(self.ambient_index(p, a, mid, b), col,
                                    f.mul(sgn, c))
                    # last: (+-) a (x) t1..t_{p-1} (x) sec(t_p) * b
                    sgn = f.one if p % 2 == 0 else f.neg(f.one)
                    head = tmid // dm1
                    for k, c in self.mult_c[self.abar_to_a[t[p - 1]]][b]:
                        bld.add(self.ambient_index(p, a, head, k), col,
                                f.mul(sgn, c))
        return bld.build()

    def omega_module(self, p, budget=None):
        return OmegaBimodule(self, p, budget or self.budget)

    def cochain_from_std(self, r, entries) -> dict:
        """Cochain given on standard-basis data, in context coordinates.

        entries: {(std_value_index, (std_abar_indices...)): coeff} where the
        standard reduced basis drops the first standard index with a nonzero
        unit coordinate.  Returns coordinates over the context's own basis.
        """
        f = self.field
        A = self.A
        # standard reduced basis bookkeeping
        std_pivot = next(i for i, c in enumerate(A.unit) if not f.is_zero(c))
        std_abar = [i for i in range(self.dim) if i != std_pivot]
        # chosen section vectors expressed through the standard reduced basis
        inv_up = f.inv(A.unit[std_pivot])
        sec_in_std = []
        for k in range(self.dm1):
            vec = self.to_standard(self.section_vec(k))
            piv_coeff = vec[std_pivot]
            acc = {}
            for j, idx in enumerate(std_abar):
                c = f.sub(vec[idx], f.mul(piv_coeff, f.mul(inv_up, A.unit[idx])))
                if not f.is_zero(c):
                    acc[j] = c
            sec_in_std.append(sorted(acc.items()))
        nt = self.tuple_count(r)
        out: dict = {}
        for s in itertools.product(range(self.dm1), repeat=r):
            combos = [((), f.one)]
            for slot in s:
                new = []
                for tup, cc in combos:
                    for j, c in sec_in_std[slot]:
                        new.append((tup + (j,), f.mul(cc, c)))
                combos = new
            t_idx = 0
            for d_ in s:
                t_idx = t_idx * self.dm1 + d_
            for tup, cc in combos:
                val_std = [f.zero] * self.dim
                for (mv, tt), coef in entries.items():
                    if tt == tup:
                        val_std[mv] = f.add(val_std[mv], f.mul(coef, cc))
                if all(f.is_zero(x) for x in val_std):
                    continue
                val = self.to_chosen(val_std)
                for m, c in enumerate(val):
                    if not f.is_zero(c):
                        cur = out.get(m * nt + t_idx, f.zero)
                        nv = f.add(cur, c)
                        if f.is_zero(nv):
                            out.pop(m * nt + t_idx, None)
                        else:
                            out[m * nt + t_idx] = nv
        return out

    def theta_duality(self, r):
        """(Theta, Theta_inv) between D(C_r(A, A_nu)) and C^r(A, A)."""
        f = self.field
        d = self.dim
        n = d * self.tuple_count(r)
        tb = MatrixBuilder(f, n, n)
        ti = MatrixBuilder(f, n, n)
        nt = self.tuple_count(r)
        for m in range(d):
            for k, c in self.v_sparse[m]:
                for t in range(nt):
                    tb.add(k * nt + t, m * nt + t, c)
            for mm in range(d):
                g = self.gram_c[m][mm]
                if not f.is_zero(g):
                    for t in range(nt):
                        ti.add(mm * nt + t, m * nt + t, g)
        return tb.build(), ti.build()


# ---------------------------------------------------------------------------


class CohomologySpace:
    """ker(out)/im(incoming) at one degree, with streaming echelons."""

    def __init__(self, complex_, degree, want_reps=True):
        self.complex = complex_
        self.degree = degree
        self.field = complex_.field
        d_in = complex_.diff(degree - 1)
        d_out = complex_.diff(degree)
        self.dim_term = complex_.term_dim(degree)
        self._b_ech = _col_echelon(d_in)
        self._rank_in = self._b_ech.rank
        self._z_ech = None
        self._rank_out = None
        self.gens = None
        self._gen_span = None
        self._d_out = d_out
        if want_reps:
            self._build_reps()
        else:
            ech = _col_echelon(d_out)
            self._rank_out = ech.rank
        self.dim = self.dim_term - self._rank_out - self._rank_in

    def _build_reps(self):
        d_out = self._d_out
        self._z_ech = _row_echelon(d_out)
        self._rank_out = self._z_ech.rank
        want = self.dim_term - self._rank_out - self._rank_in
        piv = set(int(c) for c in self._z_ech.pivot_cols())
        gens = []
        span = _SmallSpan(self.field)
        for c in range(self.dim_term):
            if len(gens) == want:
                break
            if c in piv:
                continue
            vec = self._z_ech.kernel_vector(c)
            res = self._b_ech.reduce_dict(vec)
            if res and span.add(res):
                gens.append(vec)
        assert len(gens) == want, "representative search exhausted"
        self.gens = gens
        self._gen_span = span

    def is_cocycle(self, vec) -> bool:
        return not self._d_out.matvec(vec)

    def is_coboundary(self, vec) -> bool:
        return self._b_ech.contains(vec)

    def class_coords(self, vec):
        """Coordinates of a cocycle's class in the generator basis."""
        if self.gens is None:
            self._build_reps()
        res = self._b_ech.reduce_dict(vec)
        coords = self._gen_span.coords(res)
        if coords is None:
            raise ValueError("vector is not a cocycle mod boundaries")
        return coords

    def classes_equal(self, v1, v2) -> bool:
        f = self.field
        diff = linalg.vec_sub(f, v1, v2)
        return self.is_coboundary(diff)

    def rand_cocycle(self, rng, spread=4):
        """Seeded random element of ker(out) via kernel back-substitution."""
        if self._z_ech is None:
            self._build_reps()
        piv = set(int(c) for c in self._z_ech.pivot_cols())
        free = [c for c in range(self.dim_term) if c not in piv]
        if not free:
            return {}
        f = self.field
        out = {}
        for _ in range(min(spread, len(free))):
            c = rng.choice(free)
            coef = _rand_scalar(f, rng)
            linalg.vec_addmul(f, out, coef, self._z_ech.kernel_vector(c))
        return out


class _SmallSpan:
    """Tiny span with coefficient tracking, for class coordinates."""

    def __init__(self, field):
        self.field = field
        self.rows = []          # (vec dict, lead, tags list)

    def _reduce(self, vec):
        f = self.field
        v = dict(vec)
        coeffs = [f.zero] * len(self.rows)
        for i, (row, lead, _) in enumerate(self.rows):
            c = v.get(lead)
            if c is not None and not f.is_zero(c):
                scale = f.div(c, row[lead])
                coeffs[i] = scale
                for k, w in row.items():
                    nv = f.sub(v.get(k, f.zero), f.mul(scale, w))
                    if f.is_zero(nv):
                        v.pop(k, None)
                    else:
                        v[k] = nv
        return v, coeffs

    def add(self, vec) -> bool:
        v, _ = self._reduce(vec)
        if not v:
            return False
        lead = min(v.keys())
        self.rows.append((v, lead, None))
        return True

    def coords(self, vec):
        """vec = sum coords_i row_i (in terms of the ADDED vectors)."""
        f = self.field
        # rows were added raw; tags track expressing residuals in added vecs
        # rebuild: added vec_j = sum_{i<=j} a_ij row_i with a_jj = 1
        v, coeffs = self._reduce(vec)
        if v:
            return None
        # unwind triangular corrections
        n = len(self.rows)
        out = list(coeffs)
        return out

    def __len__(self):
        return len(self.rows)


def _rand_scalar(f, rng):
    if f.size is not None:
        return f.decode(rng.randrange(1, f.size))
    from fractions import Fraction

    return Fraction(rng.randint(1, 5), rng.randint(1, 3))


def _col_echelon(M: Matrix):
    """Echelon whose rows are the columns of M (image membership, rank)."""
    from ._ffelim import new_echelon

    ech = new_echelon(M.field, M.nrows)
    if M.nnz == 0:
        return ech
    if hasattr(ech, "add_rows") and isinstance(M._v, np.ndarray):
        order = np.argsort(M._c, kind="stable")
        cols = M._c[order]
        uniq, starts = np.unique(cols, return_index=True)
        indptr = np.concatenate([starts, [len(cols)]]).astype(np.int64)
        ech.add_rows(indptr, M._r[order], M._v[order])
    else:
        for c_dict in M.transpose().rows_as_dicts():
            ech.add_row_dict(c_dict)
    return ech


def _row_echelon(M: Matrix):
    from ._ffelim import new_echelon

    ech = new_echelon(M.field, M.ncols)
    if M.nnz == 0:
        return ech
    if hasattr(ech, "add_rows") and isinstance(M._v, np.ndarray):
        order = np.argsort(M._r, kind="stable")
        rows = M._r[order]
        uniq, starts = np.unique(rows, return_index=True)
        indptr = np.concatenate([starts, [len(rows)]]).astype(np.int64)
        ech.add_rows(indptr, M._c[order], M._v[order])
    else:
        for r_dict in M.rows_as_dicts():
            ech.add_row_dict(r_dict)
    return ech


# ---------------------------------------------------------------------------


class _ComplexBase:
    """Shared caching / cohomology plumbing; degrees are cohomological."""

    def __init__(self, ctx, lo, hi, budget):
        self.ctx = ctx
        self.field = ctx.field
        self.lo = lo
        self.hi = hi
        self.budget = budget
        self._diffs = {}
        self._cohom = {}

    def term_dim(self, r) -> int:
        raise NotImplementedError

    def _build_diff(self, r) -> Matrix:
        raise NotImplementedError

    def check_window(self, r):
        if not (self.lo <= r <= self.hi):
            raise DegreeOutOfWindow(f"degree {r} outside window [{self.lo}, {self.hi}]")

    def diff(self, r) -> Matrix:
        """Differential term(r) -> term(r+1); cached."""
        if r < self.lo - 1 or r > self.hi:
            raise DegreeOutOfWindow(
                f"differential {r} outside window [{self.lo}, {self.hi}]")
        if r not in self._diffs:
            self._diffs[r] = self._build_diff(r)
        return self._diffs[r]

    def apply_diff(self, r, vec: dict) -> dict:
        return self.diff(r).matvec(vec)

    def cohomology(self, r, want_reps=True) -> CohomologySpace:
        self.check_window(r)
        cached = self._cohom.get(r)
        if cached is not None and (cached.gens is not None or not want_reps):
            return cached
        space = CohomologySpace(self, r, want_reps=want_reps)
        self._cohom[r] = space
        return space

    def betti(self, lo=None, hi=None, want_reps=False):
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        return {r: self.cohomology(r, want_reps=want_reps).dim
                for r in range(lo, hi + 1)}

    def check_d_squared(self, r) -> bool:
        return linalg.compose_is_zero(self.diff(r + 1), self.diff(r))


class BarCochainComplex(_ComplexBase):
    """C^r(A, M) = Hom(Abar^r, M) for r in [0, hi]."""

    kind = "cochain"

    def __init__(self, ctx, module, hi, budget):
        super().__init__(ctx, 0, hi, budget)
        self.module = module

    def term_dim(self, r):
        if r < 0:
            return 0
        return self.module.dim * self.ctx.tuple_count(r)

    def index(self, m, t_idx, r):
        return m * self.ctx.tuple_count(r) + t_idx

    def _build_diff(self, r):
        if r < 0:
            return Matrix.zero(self.field, self.term_dim(0), 0)
        return _cochain_diff(self.ctx, self.module, r, self.budget)

    def homology_like(self):
        return False


class BarChainComplex(_ComplexBase):
    """C_s(A, M) for s in [0, hi], exposed cohomologically at degree -s.

    homology(s) is the cohomology of the complex at cohomological degree -s.
    """

    kind = "chain"

    def __init__(self, ctx, module, hi_chain, budget):
        super().__init__(ctx, -hi_chain, 0, budget)
        self.module = module
        self.hi_chain = hi_chain

    def term_dim(self, r):
        s = -r
        if s < 0 or s > self.hi_chain + 1:
            return 0
        return self.module.dim * self.ctx.tuple_count(s)

    def _build_diff(self, r):
        # diff at cohomological r maps C_{-r} -> C_{-r-1}: boundary of degree -r
        s = -r
        if s <= 0:
            return Matrix.zero(self.field, 0, self.term_dim(r))
        return _chain_diff(self.ctx, self.module, s, self.budget)

    def homology(self, s, want_reps=True):
        return self.cohomology(-s, want_reps=want_reps)


class CompleteComplex(_ComplexBase):
    """D^r = C^r(A, A) for r >= 0 and C_{-r-1}(A, A_nu_inv) for r <= -1."""

    kind = "complete"

    def __init__(self, ctx, lo, hi, budget):
        assert lo < 0 < hi, "complete complex window must straddle 0"
        super().__init__(ctx, lo, hi, budget)
        self.mod_plus = ctx.regular_module()
        self.mod_minus = ctx.twisted_module(-1)
        self._comp_arrays = {}

    def term_dim(self, r):
        ctx = self.ctx
        if r >= 0:
            return ctx.dim * ctx.tuple_count(r)
        return ctx.dim * ctx.tuple_count(-r - 1)

    def _build_diff(self, r):
        ctx = self.ctx
        if r >= 0:
            return _cochain_diff(ctx, self.mod_plus, r, self.budget)
        if r == -1:
            return _norm_matrix(ctx)
        return _chain_diff(ctx, self.mod_minus, -r - 1, self.budget)

    # -- eigencomponent machinery -------------------------------------------

    def comp_array(self, r):
        """Component (group index) of every basis index at degree r."""
        ctx = self.ctx
        if not ctx.use_eigen:
            raise NotDiagonalizable("eigencomponents need eigen coordinates")
        if r not in self._comp_arrays:
            s = r if r >= 0 else -r - 1
            tcomp = ctx.comp_of_tuples(s)
            out = np.empty(self.term_dim(r), dtype=np.int64)
            nt = ctx.tuple_count(s)
            for m in range(ctx.dim):
                cm = ctx.comp_of_basis[m]
                if r >= 0:
                    # value eigenvalue divided by the input tuple product
                    out[m * nt:(m + 1) * nt] = ctx.gmul[cm, ctx.ginv[tcomp]]
                else:
                    out[m * nt:(m + 1) * nt] = ctx.gmul[cm, tcomp]
            self._comp_arrays[r] = out
        return self._comp_arrays[r]

    def project_vec(self, r, vec: dict, comp_id: int) -> dict:
        comp = self.comp_array(r)
        return {i: v for i, v in vec.items() if comp[i] == comp_id}

    def component_complex(self, comp_id: int) -> "ComponentComplex":
        return ComponentComplex(self, comp_id)

    def component_dims(self, r):
        comp = self.comp_array(r)
        return np.bincount(comp, minlength=len(self.ctx.group))

    # term size above which betti() sums per-eigencomponent dims instead of
    # eliminating the full differential (the complex is their direct sum)
    SPLIT_THRESHOLD = 60_000

    def betti(self, lo=None, hi=None, want_reps=False):
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        out = {}
        subs = None
        for r in range(lo, hi + 1):
            big = max(self.term_dim(r - 1), self.term_dim(r), self.term_dim(r + 1))
            if (not want_reps and self.ctx.use_eigen
                    and big > self.SPLIT_THRESHOLD):
                if subs is None:
                    subs = [self.component_complex(i)
                            for i in range(len(self.ctx.group))]
                out[r] = sum(s.cohomology(r, want_reps=False).dim for s in subs)
            else:
                out[r] = self.cohomology(r, want_reps=want_reps).dim
        return out


class ComponentComplex(_ComplexBase):
    """Subcomplex of a complete complex spanned by one eigencomponent."""

    kind = "component"

    def __init__(self, base: CompleteComplex, comp_id: int):
        super().__init__(base.ctx, base.lo, base.hi, base.budget)
        self.base = base
        self.comp_id = comp_id
        self._pos = {}

    def positions(self, r):
        if r not in self._pos:
            comp = self.base.comp_array(r)
            pos = np.flatnonzero(comp == self.comp_id)
            back = np.full(len(comp), -1, dtype=np.int64)
            back[pos] = np.arange(len(pos))
            self._pos[r] = (pos, back)
        return self._pos[r]

    def term_dim(self, r):
        pos, _ = self.positions(r)
        return int(len(pos))

    def _build_diff(self, r):
        big = self.base.diff(r)
        _, back_src = self.positions(r)
        _, back_dst = self.positions(r + 1)
        rows, cols = big._r, big._c
        keep = (back_src[cols] >= 0)
        # the differential preserves components, so rows restrict with cols
        assert bool(np.all(back_dst[rows[keep]] >= 0)), \
            "differential does not preserve eigencomponents"
        if isinstance(big._v, np.ndarray):
            vals = big._v[keep]
        else:
            vals = [v for v, k in zip(big._v, keep) if k]
        return Matrix(self.field, self.term_dim(r + 1), self.term_dim(r),
                      back_dst[rows[keep]], back_src[cols[keep]], vals)

    def restrict(self, r, vec: dict) -> dict:
        _, back = self.positions(r)
        out = {}
        for i, v in vec.items():
            j = back[i]
            assert j >= 0, "vector leaves the component"
            out[int(j)] = v
        return out

    def extend(self, r, vec: dict) -> dict:
        pos, _ = self.positions(r)
        return {int(pos[i]): v for i, v in vec.items()}


# ---------------------------------------------------------------------------
# differential builders


def _cochain_diff(ctx, module, r, budget) -> Matrix:
    """delta^r : Hom(Abar^r, M) -> Hom(Abar^{r+1}, M), as f |-> f o d_{r+1}."""
    f = ctx.field
    dm1 = ctx.dm1
    md = module.dim
    nt_in = ctx.tuple_count(r)
    nt_out = ctx.tuple_count(r + 1)
    bld = MatrixBuilder(f, md * nt_out, md * nt_in, budget=budget)
    pw = [dm1 ** k for k in range(r + 2)]
    for s in itertools.product(range(dm1), repeat=r + 1):
        s_idx = 0
        for d_ in s:
            s_idx = s_idx * dm1 + d_
        # term 0: s1 . f(s2..)
        rest = s_idx % pw[r]
        for out_m, in_m, c in module.left_abar[s[0]]:
            bld.add(out_m * nt_out + s_idx, in_m * nt_in + rest, c)
        # interior terms (-1)^i f(.. s_i s_{i+1} ..)
        for i in range(r):
            sgn_neg = (i + 1) % 2 == 1
            for k, c in ctx.secmult_bar[s[i]][s[i + 1]]:
                t_idx = 0
                for pos in range(r):
                    if pos < i:
                        digit = s[pos]
                    elif pos == i:
                        digit = k
                    else:
                        digit = s[pos + 1]
                    t_idx = t_idx * dm1 + digit
                cc = f.neg(c) if sgn_neg else c
                for m in range(md):
                    bld.add(m * nt_out + s_idx, m * nt_in + t_idx, cc)
        # last term (-1)^{r+1} f(s1..sr) . s_{r+1}
        head = s_idx // dm1
        sgn_neg = (r + 1) % 2 == 1
        for out_m, in_m, c in module.right_abar[s[r]]:
            cc = f.neg(c) if sgn_neg else c
            bld.add(out_m * nt_out + s_idx, in_m * nt_in + head, cc)
    return bld.build()


def _chain_diff(ctx, module, s, budget) -> Matrix:
    """partial_s : M (x) Abar^s -> M (x) Abar^{s-1}."""
    f = ctx.field
    dm1 = ctx.dm1
    md = module.dim
    nt_in = ctx.tuple_count(s)
    nt_out = ctx.tuple_count(s - 1)
    bld = MatrixBuilder(f, md * nt_out, md * nt_in, budget=budget)
    pw = [dm1 ** k for k in range(s + 1)]
    for t in itertools.product(range(dm1), repeat=s):
        t_idx = 0
        for d_ in t:
            t_idx = t_idx * dm1 + d_
        # m . t1  (right action in the module)
        rest = t_idx % pw[s - 1]
        for out_m, in_m, c in module.right_abar[t[0]]:
            bld.add(out_m * nt_out + rest, in_m * nt_in + t_idx, c)
        # interior contractions
        for i in range(s - 1):
            sgn_neg = (i + 1) % 2 == 1
            for k, c in ctx.secmult_bar[t[i]][t[i + 1]]:
                o_idx = 0
                for pos in range(s - 1):
                    if pos < i:
                        digit = t[pos]
                    elif pos == i:
                        digit = k
                    else:
                        digit = t[pos + 1]
                    o_idx = o_idx * dm1 + digit
                cc = f.neg(c) if sgn_neg else c
                for m in range(md):
                    bld.add(m * nt_out + o_idx, m * nt_in + t_idx, cc)
        # (-1)^s t_s . m  (left action)
        head = t_idx // dm1
        sgn_neg = s % 2 == 1
        for out_m, in_m, c in module.left_abar[t[s - 1]]:
            cc = f.neg(c) if sgn_neg else c
            bld.add(out_m * nt_out + head, in_m * nt_in + t_idx, cc)
    return bld.build()


def _norm_matrix(ctx) -> Matrix:
    """mu(m) = sum_i u_i m v_i with plain products, in chosen coordinates."""
    f = ctx.field
    d = ctx.dim
    bld = MatrixBuilder(f, d, d, budget=None)
    for m in range(d):
        acc = {}
        for u, v in zip(ctx.u_sparse, ctx.v_sparse):
            part = ctx.mul_sparse(ctx.mul_sparse(u, [(m, f.one)]), v)
            for k, c in part:
                nv = f.add(acc.get(k, f.zero), c)
                if f.is_zero(nv):
                    acc.pop(k, None)
                else:
                    acc[k] = nv
        for k, c in acc.items():
            bld.add(k, m, c)
    return bld.build()


# ---------------------------------------------------------------------------
# syzygy bimodules Omega^p = Im d_p


class OmegaBimodule:
    """Im d_p inside A (x) Abar^{p-1} (x) A with the induced actions."""

    def __init__(self, ctx, p, budget):
        assert p >= 0
        self.ctx = ctx
        self.p = p
        f = ctx.field
        if p == 0:
            self.ambient_dim = ctx.dim
            self.space = linalg.full_space(f, ctx.dim)
        else:
            d_p = ctx.bar_differential(p, budget=budget)
            self.ambient_dim = d_p.nrows
            self.space = linalg.image(d_p)
        self.dim = self.space.dim
        self._module = None

    def contains(self, dense_vec) -> bool:
        return self.space.contains(dense_vec)

    def to_coords(self, dense_vec):
        return self.space.coords_of(dense_vec)

    def from_coords(self, coords):
        return self.space.lift(coords)

    def _ambient_action(self, basis_i, left):
        """Action of chosen-basis vector i on ambient coordinates."""
        ctx = self.ctx
        f = ctx.field
        d = ctx.dim
        if self.p == 0:
            mats = ctx.mult_c
            bld = MatrixBuilder(f, d, d)
            for j in range(d):
                pair = ctx.mult_c[basis_i][j] if left else ctx.mult_c[j][basis_i]
                for k, c in pair:
                    bld.add(k, j, c)
            return bld.build()
        nt = ctx.tuple_count(self.p - 1)
        n = self.ambient_dim
        bld = MatrixBuilder(f, n, n)
        for a in range(d):
            for b in range(d):
                pair = ctx.mult_c[basis_i][a] if left else ctx.mult_c[b][basis_i]
                for k, c in pair:
                    for mid in range(nt):
                        if left:
                            bld.add(ctx.ambient_index(self.p, k, mid, b),
                                    ctx.ambient_index(self.p, a, mid, b), c)
                        else:
                            bld.add(ctx.ambient_index(self.p, a, mid, k),
                                    ctx.ambient_index(self.p, a, mid, b), c)
        return bld.build()

    def coeff_module(self) -> CoeffModule:
        """Restricted bimodule in subspace coordinates, for Ext computations."""
        if self._module is not None:
            return self._module
        ctx = self.ctx
        f = ctx.field
        d = ctx.dim
        left_mats, right_mats = [], []
        for i in range(d):
            for left in (True, False):
                amb = self._ambient_action(i, left)
                bld = MatrixBuilder(f, self.dim, self.dim)
                for j, row in enumerate(self.space.basis):
                    img = amb.matvec(linalg.vec_from_dense(f, row))
                    coords = self.space.coords_of(linalg.vec_to_dense(f, img, self.ambient_dim))
                    assert coords is not None, "Omega^p not closed under action"
                    for k, c in enumerate(coords):
                        if not f.is_zero(c):
                            bld.add(k, j, c)
                (left_mats if left else right_mats).append(bld.build())
        self._module = ctx.module_from_actions(self.dim, left_mats, right_mats,
                                               name=f"Omega^{self.p}")
        return self._module
