"""The three built-in minimal complete resolutions for the self-injective
Nakayama algebras (s, N) in {(2,2), (3,2), (3,3)}.

Each preset stores its projective summands P(i,j) = Ae_i (x) e_jA per degree
and the differentials as generator-image data; everything else (dualizing,
twisting by the Nakayama automorphism, Hom_{A^e}(-, A), cohomology) is
derived mechanically, so the transcription from the resolution data is
auditable term by term.  Degrees are unbounded: terms repeat periodically.
"""

from __future__ import annotations

from . import linalg
from .algebra import nakayama_algebra, socle_trace_form
from .errors import InadmissibleCharacteristic, ValidationFailure
from .hochschild import BarContext
from .linalg import Matrix, MatrixBuilder, Subspace

PRESETS = ("s2n2", "s3n2", "s3n3")


def _preset_params(which):
    return {"s2n2": (2, 2), "s3n2": (3, 2), "s3n3": (3, 3)}[which]


def check_admissible(which, field):
    p = field.characteristic()
    s, n = _preset_params(which)
    if which == "s2n2" and p == 2:
        raise InadmissibleCharacteristic("s2n2 needs characteristic != 2")
    if which in ("s3n2", "s3n3") and p == 3:
        raise InadmissibleCharacteristic(f"{which} needs characteristic != 3")


def _summands(which, n):
    """List of (i, j) with P(i,j) = Ae_i (x) e_jA at degree n >= 0; 0-based."""
    s, _ = _preset_params(which)
    if which == "s2n2":
        return [(i, (i + n) % 2) for i in range(2)]
    if which == "s3n3":
        # P(i, i+1) in odd degrees, P(i, i) in even degrees
        return [(i, (i + n % 2) % 3) for i in range(3)]
    # s3n2: summand shape has period 3
    return [(i, (i + n) % 3) for i in range(3)]


def _phi_terms(which, n):
    """Generator images of phi_n : P_n -> P_{n-1} (n >= 1).

    Returns, per source summand index, a list of
    (left_path, right_path, sign, target_summand_index) with paths given as
    (start_vertex, length), acting as e_i (x) e_j |-> sum left (x) right.
    """
    s, N = _preset_params(which)
    out = []
    if which == "s2n2":
        for idx, (i, j) in enumerate(_summands(which, n)):
            if n % 2 == 1:
                # phi_{2r+1}(e_i (x) e_{i+1}) = a_i (x) e_{i+1} - e_i (x) a_i
                out.append([((i, 1), (j, 0), +1, None),
                            ((i, 0), (i, 1), -1, None)])
            else:
                # phi_{2r}(e_i (x) e_i) = e_i (x) a_{i+1} + a_i (x) e_i
                out.append([((i, 0), ((i + 1) % s, 1), +1, None),
                            ((i, 1), (i, 0), +1, None)])
        return out
    if which == "s3n3":
        for idx, (i, j) in enumerate(_summands(which, n)):
            if n % 2 == 1:
                out.append([((i, 1), (j, 0), +1, None),
                            ((i, 0), (i, 1), -1, None)])
            else:
                # e_i (x) a_{i+1}a_{i+2} + a_i (x) a_{i+2} + a_i a_{i+1} (x) e_i
                out.append([((i, 0), ((i + 1) % s, 2), +1, None),
                            ((i, 1), ((i + 2) % s, 1), +1, None),
                            ((i, 2), (i, 0), +1, None)])
        return out
    # s3n2, six-periodic differentials
    m = (n - 1) % 6 + 1
    for idx, (i, j) in enumerate(_summands(which, n)):
        if m == 1:
            out.append([((i, 1), (j, 0), +1, None), ((i, 0), (i, 1), -1, None)])
        elif m == 2:
            out.append([((i, 0), ((i + 1) % s, 1), +1, None),
                        ((i, 1), (j, 0), +1, None)])
        elif m == 3:
            out.append([((i, 1), (i, 0), +1, None),
                        ((i, 0), ((i + 2) % s, 1), -1, None)])
        elif m == 4:
            out.append([((i, 0), (i, 1), +1, None),
                        ((i, 1), ((i + 1) % s, 0), +1, None)])
        elif m == 5:
            out.append([((i, 1), ((i + 2) % s, 0), +1, None),
                        ((i, 0), ((i + 1) % s, 1), -1, None)])
        else:
            out.append([((i, 0), ((i + 2) % s, 1), +1, None),
                        ((i, 1), (i, 0), +1, None)])
    return out


class PresetResolution:
    """Mechanically expanded complete resolution and its Hom(-, A) complex."""

    def __init__(self, which, field):
        check_admissible(which, field)
        self.which = which
        self.field = field
        s, N = _preset_params(which)
        self.s, self.N = s, N
        self.A = nakayama_algebra(field, s, N)
        self.frob = socle_trace_form(self.A)
        self._paths = [(v, l) for l in range(N) for v in range(s)]
        self._pidx = {p: k for k, p in enumerate(self._paths)}
        self._hom = {}
        self._maps = {}
        self._coh = {}

    # -- path helpers --------------------------------------------------------

    def path_index(self, path):
        return self._pidx[(path[0] % self.s, path[1])]

    def _paths_ending_at(self, i):
        return [(v, l) for (v, l) in self._paths if (v + l) % self.s == i]

    def _paths_starting_at(self, j):
        return [(v, l) for (v, l) in self._paths if v == j]

    def proj_basis(self, n):
        """Basis of P_n: (summand_idx, p, q) with p in Ae_i, q in e_jA."""
        out = []
        for idx, (i, j) in enumerate(_summands(self.which, n)):
            for p in self._paths_ending_at(i):
                for q in self._paths_starting_at(j):
                    out.append((idx, p, q))
        return out

    def _proj_actions(self, n):
        """Left/right action matrices of algebra basis paths on P_n."""
        f = self.field
        basis = self.proj_basis(n)
        index = {b: k for k, b in enumerate(basis)}
        dim = len(basis)
        lefts, rights = [], []
        for g in self._paths:
            lb = MatrixBuilder(f, dim, dim)
            rb = MatrixBuilder(f, dim, dim)
            for k, (idx, p, q) in enumerate(basis):
                gp = self._compose(g, p)
                if gp is not None:
                    lb.add(index[(idx, gp, q)], k, f.one)
                qg = self._compose(q, g)
                if qg is not None:
                    rb.add(index[(idx, p, qg)], k, f.one)
            lefts.append(lb.build())
            rights.append(rb.build())
        return basis, lefts, rights

    def _compose(self, p1, p2):
        (v1, l1), (v2, l2) = p1, p2
        if (v1 + l1) % self.s != v2 or l1 + l2 >= self.N:
            return None
        return (v1, l1 + l2)

    def phi_matrix(self, n) -> Matrix:
        """phi_n : P_n -> P_{n-1} for n >= 1, as a matrix on path-pair bases."""
        f = self.field
        src = self.proj_basis(n)
        dst = self.proj_basis(n - 1)
        dst_index = {b: k for k, b in enumerate(dst)}
        dst_summands = _summands(self.which, n - 1)
        terms = _phi_terms(self.which, n)
        b = MatrixBuilder(f, len(dst), len(src))
        for k, (idx, p, q) in enumerate(src):
            for (lpath, rpath, sign, _tgt) in terms[idx]:
                pl = self._compose(p, (lpath[0] % self.s, lpath[1]))
                qr = self._compose((rpath[0] % self.s, rpath[1]), q)
                if pl is None or qr is None:
                    continue
                # locate the target summand by endpoint types
                ti = (pl[0] + pl[1]) % self.s
                tj = qr[0]
                tgt = dst_summands.index((ti, tj))
                coeff = f.one if sign > 0 else f.neg(f.one)
                b.add(dst_index[(tgt, pl, qr)], k, coeff)
        return b.build()

    # -- complete resolution terms -------------------------------------------

    def term(self, r):
        """(dim, left_mats, right_mats, tag) of T_r in the resolution."""
        if r >= 0:
            basis, L, R = self._proj_actions(r)
            return len(basis), L, R, ("P", r)
        sdeg = -r - 1
        basis, L, R = self._proj_actions(sdeg)
        f = self.field
        dim = len(basis)
        nuinv = self.frob.nu_inv
        # D(M)_{nu^{-1}}: L'(g) = R_M(g)^T, R'(g) = L_M(nu^{-1} g)^T
        Lp, Rp = [], []
        for gi, g in enumerate(self._paths):
            Lp.append(R[gi].transpose())
            vec = linalg.vec_to_dense(f, nuinv.matvec({gi: f.one}), self.A.dim)
            acc = Matrix.zero(f, dim, dim)
            for bi, c in enumerate(vec):
                if not f.is_zero(c):
                    acc = acc.add(L[bi].transpose().scale(c))
            Rp.append(acc)
        return dim, Lp, Rp, ("DP", sdeg)

    def resolution_map(self, r) -> Matrix:
        """d : T_r -> T_{r-1}; r = 0 gives the middle splice map."""
        if r in self._maps:
            return self._maps[r]
        f = self.field
        if r >= 1:
            m = self.phi_matrix(r)
        elif r == 0:
            # D(phi_0) o phi o phi_0 : P_0 -> D(P_0)_{nu^{-1}}
            basis0 = self.proj_basis(0)
            d = self.A.dim
            mult = MatrixBuilder(f, d, len(basis0))
            for k, (idx, p, q) in enumerate(basis0):
                pq = self._compose(p, q)
                if pq is not None:
                    mult.add(self.path_index(pq), k, f.one)
            phi0 = mult.build()
            gram = Matrix.from_dense(f, self.frob.gram)  # a -> <-, a>
            m = phi0.transpose().compose(gram).compose(phi0)
        else:
            # d_{-s} = D(phi_s): g -> g o phi_s on dual coordinates
            m = self.phi_matrix(-r).transpose()
        self._maps[r] = m
        return m

    # -- Hom_{A^e}(-, A) ------------------------------------------------------

    def hom_space(self, r):
        """Basis of Hom_{A^e}(T_r, A) as a Subspace of Hom_k(T_r, A)."""
        if r in self._hom:
            return self._hom[r]
        f = self.field
        dim, L, R, _ = self.term(r)
        A = self.A
        d = A.dim
        unknowns = d * dim

        rows = []
        for gi in range(d):
            LA = A.left_mult_matrix(A.basis_vector(gi)).to_dense()
            RA = A.right_mult_matrix(A.basis_vector(gi)).to_dense()
            LX = L[gi].to_dense()
            RX = R[gi].to_dense()
            for rr in range(d):
                for cc in range(dim):
                    row1 = {}
                    row2 = {}
                    for k in range(d):
                        if not f.is_zero(LA[rr][k]):
                            _acc(f, row1, k * dim + cc, LA[rr][k])
                        if not f.is_zero(RA[rr][k]):
                            _acc(f, row2, k * dim + cc, RA[rr][k])
                    for k in range(dim):
                        if not f.is_zero(LX[k][cc]):
                            _acc(f, row1, rr * dim + k, f.neg(LX[k][cc]))
                        if not f.is_zero(RX[k][cc]):
                            _acc(f, row2, rr * dim + k, f.neg(RX[k][cc]))
                    rows.append(row1)
                    rows.append(row2)
        b = MatrixBuilder(f, len(rows), unknowns)
        for ri, row in enumerate(rows):
            for cc, v in row.items():
                b.add(ri, cc, v)
        space = linalg.kernel(b.build())
        self._hom[r] = space
        return space

    def induced_map(self, r) -> Matrix:
        """Hom(T_r, A) -> Hom(T_{r+1}, A) by precomposition with d_{r+1}."""
        f = self.field
        src = self.hom_space(r)
        dst = self.hom_space(r + 1)
        dmat = self.resolution_map(r + 1).to_dense()   # T_{r+1} -> T_r
        dim_r = self.term(r)[0]
        dim_r1 = self.term(r + 1)[0]
        d = self.A.dim
        out = MatrixBuilder(f, dst.dim, src.dim)
        for sj, Fvec in enumerate(src.basis):
            img = [f.zero] * (d * dim_r1)
            for rr in range(d):
                for cc in range(dim_r1):
                    acc = f.zero
                    for k in range(dim_r):
                        Fv = Fvec[rr * dim_r + k]
                        if not f.is_zero(Fv) and not f.is_zero(dmat[k][cc]):
                            acc = f.add(acc, f.mul(Fv, dmat[k][cc]))
                    img[rr * dim_r1 + cc] = acc
            coords = dst.coords_of(img)
            assert coords is not None, "image not A^e-linear; data bug"
            for di, c in enumerate(coords):
                out.add(di, sj, c)
        return out.build()

    def cohomology(self, r):
        """(dim, generator coordinate vectors in Hom_k(T_r, A))."""
        if r in self._coh:
            return self._coh[r]
        f = self.field
        out_map = self.induced_map(r)
        in_map = self.induced_map(r - 1)
        Z = linalg.kernel(out_map)
        Bsub = linalg.image(in_map)
        reps, project = linalg.quotient_basis(Z, Bsub)
        src = self.hom_space(r)
        gens = [src.lift(rep) for rep in reps]
        self._coh[r] = (len(reps), gens)
        return self._coh[r]

    def dims(self, lo, hi):
        return {r: self.cohomology(r)[0] for r in range(lo, hi + 1)}


def preset_complete_cohomology(which, field, lo, hi):
    """Dimension table and generators from the built-in resolution."""
    pr = PresetResolution(which, field)
    dims = pr.dims(lo, hi)
    gens = {r: pr.cohomology(r)[1] for r in range(lo, hi + 1)}
    return {"dims": dims, "generators": gens, "resolution": pr}


def expected_table(which, char, r):
    """Paper dimension tables for the three presets; char matters for s3n2."""
    if which == "s2n2":
        return 1
    if which == "s3n3":
        return 1
    if char == 2:
        if r >= 0:
            return 1 if r % 3 in (0, 1) else 0
        n = -r
        return 0 if n % 3 == 1 else 1
    if r >= 0:
        return 1 if r % 6 in (0, 1) else 0
    n = -r
    return 1 if n % 6 in (0, 5) else 0


def cross_validate(which, field, bar_lo, bar_hi, budget=None):
    """Preset dims vs the bar-side complete complex on the overlap window."""
    pr = PresetResolution(which, field)
    preset_dims = pr.dims(bar_lo, bar_hi)
    ctx = BarContext(pr.A, pr.frob, use_eigen=None)
    D = ctx.complete_complex(bar_lo, bar_hi, budget=budget)
    bar_dims = D.betti(bar_lo, bar_hi)
    mismatches = {r: (preset_dims[r], bar_dims[r])
                  for r in preset_dims if preset_dims[r] != bar_dims[r]}
    if mismatches:
        raise ValidationFailure(f"preset/bar dimension mismatch: {mismatches}")
    return preset_dims


def _acc(f, row, key, val):
    nv = f.add(row.get(key, f.zero), val)
    if f.is_zero(nv):
        row.pop(key, None)
    else:
        row[key] = nv
