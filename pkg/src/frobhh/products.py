"""Products on the complete complex and on singular (syzygy-valued) cochains.

Complete-complex elements are (degree, dict) pairs in the BarContext layout.
The star product follows the four case formulas; cup/cap/circle are the
classical operations; the bullet operations, [ , ]_sg, the edge projections,
Phi, theta, the sign-twisted phi iterates and kappa realize the singular
cochain calculus with values in the syzygy bimodules.
"""

from __future__ import annotations

import itertools

from .errors import DegreeMismatch, IndexOutOfRange, MixedComplexes
from .linalg import vec_addmul, vec_scale, vec_sub


def _sgn(f, exponent):
    return f.one if exponent % 2 == 0 else f.neg(f.one)


# ---------------------------------------------------------------------------
# complete-complex star product


def star(ctx, deg_x, x: dict, deg_y, y: dict):
    """x * y on the complete complex; returns (degree, dict)."""
    if deg_x >= 0 and deg_y >= 0:
        return deg_x + deg_y, cup(ctx, deg_x, x, deg_y, y)
    if deg_x < 0 <= deg_y:
        p, m = -deg_x - 1, deg_y
        if p >= m:
            return deg_x + deg_y, _star_chain_cochain(ctx, p, x, m, y)
        return deg_x + deg_y, _star_case3b(ctx, p, x, m, y)
    if deg_y < 0 <= deg_x:
        p, m = -deg_y - 1, deg_x
        if p >= m:
            return deg_x + deg_y, _star_cochain_chain(ctx, m, x, p, y)
        return deg_x + deg_y, _star_case3a(ctx, m, x, p, y)
    return deg_x + deg_y, _star_chain_chain(ctx, -deg_x - 1, x, -deg_y - 1, y)


def cup(ctx, m, x: dict, n, y: dict) -> dict:
    """(f cup g)(a_1..a_{m+n}) = f(a_1..a_m) g(a_{m+1}..)."""
    f = ctx.field
    ntn = ctx.tuple_count(n)
    ntm = ctx.tuple_count(m)
    out: dict = {}
    nt_out = ctx.tuple_count(m + n)
    for ix, cx in x.items():
        mi, ti = divmod(ix, ntm)
        for iy, cy in y.items():
            mj, tj = divmod(iy, ntn)
            c = f.mul(cx, cy)
            t_out = ti * ntn + tj
            for k, w in ctx.mult_c[mi][mj]:
                _bump(f, out, k * nt_out + t_out, f.mul(c, w))
    return out


def _star_chain_cochain(ctx, p, x, m, y) -> dict:
    """Case 2(a): (a0 (x) t) * f = a0 nu^{-1}(f(t_head)) (x) t_tail, p >= m."""
    f = ctx.field
    ntp = ctx.tuple_count(p)
    ntm = ctx.tuple_count(m)
    nt_tail = ctx.tuple_count(p - m)
    out: dict = {}
    for ix, cx in x.items():
        m0, t = divmod(ix, ntp)
        head, tail = divmod(t, nt_tail)
        for mf in range(ctx.dim):
            cy = y.get(mf * ntm + head)
            if cy is None:
                continue
            c = f.mul(cx, cy)
            val = ctx.mul_sparse([(m0, f.one)],
                                 ctx.nu_apply_sparse([(mf, f.one)], -1))
            for k, w in val:
                _bump(f, out, k * nt_tail + tail, f.mul(c, w))
    return out


def _star_cochain_chain(ctx, m, x, p, y) -> dict:
    """Case 2(b): f * (a0 (x) t) = f(t_tail) a0 (x) t_head, p >= m."""
    f = ctx.field
    ntp = ctx.tuple_count(p)
    ntm = ctx.tuple_count(m)
    nt_head = ctx.tuple_count(p - m)
    out: dict = {}
    for iy, cy in y.items():
        m0, t = divmod(iy, ntp)
        head, tail = divmod(t, ntm)
        for mf in range(ctx.dim):
            cx = x.get(mf * ntm + tail)
            if cx is None:
                continue
            c = f.mul(cx, cy)
            for k, w in ctx.mult_c[mf][m0]:
                _bump(f, out, k * nt_head + head, f.mul(c, w))
    return out


def _case3_tables(ctx):
    """Per basis vector m0: expansions over the dual pair used by case 3."""
    if getattr(ctx, "_case3", None) is None:
        f = ctx.field
        tab_a = []   # [m0][k] -> value vector sum_i pi(u_i nu(m0))_k * v_i
        tab_b = []   # [m0] -> list of (u_i nu(m0) sparse, pi(v_i) sparse)
        for m0 in range(ctx.dim):
            nu_m0 = ctx.nu_apply_sparse([(m0, f.one)], 1)
            slots_a = [dict() for _ in range(ctx.dm1)]
            per_i = []
            for u, v in zip(ctx.u_sparse, ctx.v_sparse):
                u_nu = ctx.mul_sparse(u, nu_m0)
                pibar = ctx._pi_sparse(u_nu)
                for k, c in pibar:
                    for j, vj in v:
                        prev = slots_a[k].get(j, f.zero)
                        nv = f.add(prev, f.mul(c, vj))
                        if f.is_zero(nv):
                            slots_a[k].pop(j, None)
                        else:
                            slots_a[k][j] = nv
                per_i.append((u_nu, ctx._pi_sparse(v)))
            tab_a.append([sorted(s.items()) for s in slots_a])
            tab_b.append(per_i)
        ctx._case3 = (tab_a, tab_b)
    return ctx._case3


def _star_case3a(ctx, m, x, p, y) -> dict:
    """Case 3(a), p < m: (f * a)(b) = sum_i f(b (x) bar(u_i nu(a0)) (x) t) v_i."""
    f = ctx.field
    tab_a, _ = _case3_tables(ctx)
    ntm = ctx.tuple_count(m)
    ntp = ctx.tuple_count(p)
    out_len = m - p - 1
    nt_out = ctx.tuple_count(out_len)
    out: dict = {}
    # f-coord input tuple tf = (b(out_len), k, t(p))
    for ixf, cf in x.items():
        mf, tf = divmod(ixf, ntm)
        rest, t_p = divmod(tf, ntp)
        b_part, k = divmod(rest, ctx.dm1)
        for iy, cy in y.items():
            m0, t_a = divmod(iy, ntp)
            if t_a != t_p:
                continue
            c = f.mul(cf, cy)
            for j, vj in tab_a[m0][k]:
                for kk, w in ctx.mult_c[mf][j]:
                    _bump(f, out, kk * nt_out + b_part,
                          f.mul(c, f.mul(vj, w)))
    return out


def _star_case3b(ctx, p, x, m, y) -> dict:
    """Case 3(b), p < m: (a * f)(b) = sum_i u_i nu(a0) f(t (x) bar(v_i) (x) b)."""
    f = ctx.field
    _, tab_b = _case3_tables(ctx)
    ntm = ctx.tuple_count(m)
    ntp = ctx.tuple_count(p)
    out_len = m - p - 1
    nt_out = ctx.tuple_count(out_len)
    out: dict = {}
    # f-coord input tuple tf = (t(p), k, b(out_len))
    for ixf, cf in y.items():
        mf, tf = divmod(ixf, ntm)
        rest, b_part = divmod(tf, nt_out)
        t_p, k = divmod(rest, ctx.dm1)
        for ix, cx in x.items():
            m0, t_a = divmod(ix, ntp)
            if t_a != t_p:
                continue
            c = f.mul(cf, cx)
            for u_nu, pi_v in tab_b[m0]:
                w_k = _coeff_at(f, pi_v, k)
                if w_k is None:
                    continue
                val = ctx.mul_sparse(u_nu, [(mf, f.one)])
                for kk, w in val:
                    _bump(f, out, kk * nt_out + b_part,
                          f.mul(c, f.mul(w_k, w)))
    return out


def _star_chain_chain(ctx, p, x, q, y) -> dict:
    """Case 4: a * b = sum_i v_i b0 (x) tb (x) bar(u_i nu(a0)) (x) ta."""
    f = ctx.field
    _, tab_b = _case3_tables(ctx)
    ntp = ctx.tuple_count(p)
    ntq = ctx.tuple_count(q)
    nt_out = ctx.tuple_count(p + q + 1)
    out: dict = {}
    for ix, cx in x.items():
        m0a, ta = divmod(ix, ntp)
        for iy, cy in y.items():
            m0b, tb = divmod(iy, ntq)
            c = f.mul(cx, cy)
            for u, v in zip(ctx.u_sparse, ctx.v_sparse):
                u_nu = ctx.mul_sparse(u, ctx.nu_apply_sparse([(m0a, f.one)], 1))
                mid = ctx._pi_sparse(u_nu)
                if not mid:
                    continue
                val = ctx.mul_sparse(v, [(m0b, f.one)])
                if not val:
                    continue
                for k_mid, c_mid in mid:
                    t_out = (tb * ctx.dm1 + k_mid) * ntp + ta
                    for kk, w in val:
                        _bump(f, out, kk * nt_out + t_out,
                              f.mul(c, f.mul(c_mid, w)))
    return out


def _bump(f, out, key, val):
    if f.is_zero(val):
        return
    nv = f.add(out.get(key, f.zero), val)
    if f.is_zero(nv):
        out.pop(key, None)
    else:
        out[key] = nv


def _coeff_at(f, sparse, k):
    for kk, c in sparse:
        if kk == k:
            return c
    return None


def cap(ctx, r, z: dict, p, g: dict):
    """z cap g for a chain z of degree r and cochain g of degree p, r >= p."""
    if r < p:
        raise DegreeMismatch(f"cap needs chain degree {r} >= cochain degree {p}")
    return _star_chain_cochain(ctx, r, z, p, g)


# ---------------------------------------------------------------------------
# classical circle product / Gerstenhaber bracket on C^*(A, A)


def circle(ctx, m, x: dict, n, y: dict) -> dict:
    """f o g: insert pi(g(...)) into each slot of f with the classical signs."""
    f = ctx.field
    if m == 0:
        return {}
    ntm = ctx.tuple_count(m)
    ntn = ctx.tuple_count(n)
    nt_out = ctx.tuple_count(m + n - 1)
    out: dict = {}
    pib = ctx.pi_c
    for ixf, cf in x.items():
        mf, tf = divmod(ixf, ntm)
        digits = _digits(ctx, tf, m)
        for i in range(1, m + 1):
            sgn = _sgn(f, (i - 1) * (n - 1))
            k = digits[i - 1]
            prefix = digits[:i - 1]
            suffix = digits[i:]
            for iy, cy in y.items():
                mg, tg = divmod(iy, ntn)
                w = _coeff_at(f, pib[mg], k)
                if w is None:
                    continue
                t_out = 0
                for d_ in prefix:
                    t_out = t_out * ctx.dm1 + d_
                t_out = t_out * ntn + tg
                for d_ in suffix:
                    t_out = t_out * ctx.dm1 + d_
                c = f.mul(f.mul(cf, cy), f.mul(sgn, w))
                _bump(f, out, mf * nt_out + t_out, c)
    return out


def gerstenhaber_bracket(ctx, m, x: dict, n, y: dict) -> dict:
    """[f, g] = f o g - (-1)^{(m-1)(n-1)} g o f."""
    f = ctx.field
    fg = circle(ctx, m, x, n, y)
    gf = circle(ctx, n, y, m, x)
    return vec_sub(f, fg, vec_scale(f, _sgn(f, (m - 1) * (n - 1)), gf))


def _digits(ctx, t_idx, length):
    out = []
    for _ in range(length):
        t_idx, d = divmod(t_idx, ctx.dm1)
        out.append(d)
    out.reverse()
    return out


def _pack(ctx, digits):
    t = 0
    for d_ in digits:
        t = t * ctx.dm1 + d_
    return t


# ---------------------------------------------------------------------------
# singular cochains valued in the syzygy bimodules


class SgCochain:
    """Element of C^m(A, Omega^p) with values in ambient bar coordinates.

    Coordinates: value_index * (d-1)^m + input_tuple, where value_index runs
    over A (p = 0) or A (x) Abar^{p-1} (x) A (p >= 1).
    """

    def __init__(self, ctx, m, p, coords=None):
        self.ctx = ctx
        self.m = m
        self.p = p
        self.coords = coords or {}

    def value_dim(self):
        return self.ctx.dim if self.p == 0 else self.ctx.ambient_bar_dims(self.p)

    def value_at(self, t_idx) -> dict:
        nt = self.ctx.tuple_count(self.m)
        out = {}
        for ix, c in self.coords.items():
            v, t = divmod(ix, nt)
            if t == t_idx:
                out[v] = c
        return out

    def scaled(self, c):
        return SgCochain(self.ctx, self.m, self.p,
                         vec_scale(self.ctx.field, c, self.coords))

    def plus(self, other):
        assert (self.m, self.p) == (other.m, other.p)
        f = self.ctx.field
        out = dict(self.coords)
        for k, v in other.coords.items():
            _bump(f, out, k, v)
        return SgCochain(self.ctx, self.m, self.p, out)

    def minus(self, other):
        return self.plus(other.scaled(self.ctx.field.neg(self.ctx.field.one)))

    def values_in_omega(self, omega) -> bool:
        f = self.ctx.field
        nt = self.ctx.tuple_count(self.m)
        by_tuple = {}
        for ix, c in self.coords.items():
            v, t = divmod(ix, nt)
            by_tuple.setdefault(t, {})[v] = c
        from .linalg import vec_to_dense

        for t, vec in by_tuple.items():
            if not omega.contains(vec_to_dense(f, vec, omega.ambient_dim)):
                return False
        return True

    def to_module_coords(self, omega) -> dict:
        """Coordinates in the cochain complex over omega.coeff_module()."""
        f = self.ctx.field
        nt = self.ctx.tuple_count(self.m)
        by_tuple = {}
        for ix, c in self.coords.items():
            v, t = divmod(ix, nt)
            by_tuple.setdefault(t, {})[v] = c
        from .linalg import vec_to_dense

        out = {}
        for t, vec in by_tuple.items():
            coords = omega.to_coords(vec_to_dense(f, vec, omega.ambient_dim))
            assert coords is not None, "value outside Omega^p"
            for k, c in enumerate(coords):
                if not f.is_zero(c):
                    out[k * nt + t] = c
        return out

    @staticmethod
    def from_plain_cochain(ctx, m, vec: dict):
        """C^m(A, A) viewed as bidegree (m, 0)."""
        return SgCochain(ctx, m, 0, dict(vec))


def _value_split(ctx, p, v_idx):
    """Ambient value index -> (a, mid_tuple_index, b); p >= 1."""
    d = ctx.dim
    am, b = divmod(v_idx, d)
    a, mid = divmod(am, ctx.tuple_count(p - 1))
    return a, mid, b


def _value_join(ctx, p, a, mid, b):
    return (a * ctx.tuple_count(p - 1) + mid) * ctx.dim + b


def sg_projections(fc: SgCochain):
    """(f^(l), f^(r), f^(b)) as coordinate dicts.

    f^(l): Abar^p (x) A,  f^(r): A (x) Abar^p,  f^(b): Abar^{p+1}; all with
    the same input tuples.  Requires p >= 1.
    """
    ctx = fc.ctx
    assert fc.p >= 1, "edge projections need p >= 1"
    f = ctx.field
    nt = ctx.tuple_count(fc.m)
    ntq = ctx.tuple_count(fc.p - 1)
    d, dm1 = ctx.dim, ctx.dm1
    fl, fr, fb = {}, {}, {}
    for ix, c in fc.coords.items():
        v, t = divmod(ix, nt)
        a, mid, b = _value_split(ctx, fc.p, v)
        for ka, ca in ctx.pi_c[a]:
            _bump(f, fl, ((ka * ntq + mid) * d + b) * nt + t, f.mul(c, ca))
        for kb, cb in ctx.pi_c[b]:
            _bump(f, fr, ((a * ntq + mid) * dm1 + kb) * nt + t, f.mul(c, cb))
            for ka, ca in ctx.pi_c[a]:
                _bump(f, fb, ((ka * ntq + mid) * dm1 + kb) * nt + t,
                      f.mul(c, f.mul(ca, cb)))
    return fl, fr, fb


def _fr_terms(ctx, p, v_idx):
    """f^(r) expansion of one ambient value: list of (a, p-digit tuple, coeff)."""
    f = ctx.field
    if p == 0:
        return [(v_idx, (), f.one)]
    a, mid, b = _value_split(ctx, p, v_idx)
    digits = tuple(_digits(ctx, mid, p - 1))
    return [(a, digits + (kb,), cb) for kb, cb in ctx.pi_c[b]]


def _fb_terms(ctx, p, v_idx):
    """f^(b) expansion: list of ((p+1)-digit tuple, coeff)."""
    f = ctx.field
    if p == 0:
        return [((ka,), ca) for ka, ca in ctx.pi_c[v_idx]]
    a, mid, b = _value_split(ctx, p, v_idx)
    digits = tuple(_digits(ctx, mid, p - 1))
    out = []
    for ka, ca in ctx.pi_c[a]:
        for kb, cb in ctx.pi_c[b]:
            out.append(((ka,) + digits + (kb,), f.mul(ca, cb)))
    return out


def bar_d_value(ctx, n, a_sparse, digits, b_sparse) -> dict:
    """d_n applied to sum_a sum_b (a (x) digits (x) b); ambient coords of Bar_{n-1}.

    For n = 0 the result is the plain product in A coordinates.
    """
    f = ctx.field
    out: dict = {}
    if n == 0:
        for k, c in ctx.mul_sparse(a_sparse, b_sparse):
            _bump(f, out, k, c)
        return out
    digits = list(digits)
    head = _pack(ctx, digits[:-1])
    rest = _pack(ctx, digits[1:])
    for a, ca in a_sparse:
        for b, cb in b_sparse:
            c0 = f.mul(ca, cb)
            # a * sec(d1) (x) rest (x) b
            for k, w in ctx.mult_c[a][ctx.abar_to_a[digits[0]]]:
                _bump(f, out, ctx.ambient_index(n, k, rest, b), f.mul(c0, w))
            # interior contractions
            for i in range(n - 1):
                sgn = _sgn(f, i + 1)
                for k, w in ctx.secmult_bar[digits[i]][digits[i + 1]]:
                    mid = _pack(ctx, digits[:i] + [k] + digits[i + 2:])
                    _bump(f, out, ctx.ambient_index(n, a, mid, b),
                          f.mul(c0, f.mul(sgn, w)))
            # (-1)^n a (x) head (x) sec(d_n) * b
            sgn = _sgn(f, n)
            for k, w in ctx.mult_c[ctx.abar_to_a[digits[-1]]][b]:
                _bump(f, out, ctx.ambient_index(n, a, head, k),
                      f.mul(c0, f.mul(sgn, w)))
    return out


def bullet_i(fc: SgCochain, gc: SgCochain, i: int) -> SgCochain:
    """f bullet_i g per the displayed compositions; i in [1,m] or [-q,-1]."""
    ctx = fc.ctx
    if ctx is not gc.ctx:
        raise MixedComplexes("operands from different contexts")
    m, p = fc.m, fc.p
    n, q = gc.m, gc.p
    if m < 1 or n < 1:
        raise IndexOutOfRange("bullet needs m, n >= 1")
    if i >= 1:
        if i > m:
            raise IndexOutOfRange(f"i = {i} exceeds m = {m}")
        return _bullet_pos(fc, gc, i)
    if i <= -1:
        if q == 0 or -i > q:
            raise IndexOutOfRange(f"i = {i} needs 1 <= -i <= q = {q}")
        return _bullet_neg(fc, gc, -i)
    raise IndexOutOfRange("i = 0 is not defined")


def _bullet_pos(fc: SgCochain, gc: SgCochain, i: int) -> SgCochain:
    ctx = fc.ctx
    f = ctx.field
    m, p = fc.m, fc.p
    n, q = gc.m, gc.p
    ntm = ctx.tuple_count(m)
    ntn = ctx.tuple_count(n)
    out = SgCochain(ctx, m + n - 1, p + q)
    a1 = i - 1                       # leading output slots consumed before g
    g_in_f = min(q + 1, m - a1)      # slots of g^(b) seen by f^(r)
    free = g_in_f - 1                # trailing w-slots that bypass f
    for ixf, cf in fc.coords.items():
        vf, tf = divmod(ixf, ntm)
        tf_digits = _digits(ctx, tf, m)
        for af, f_tail, c_fr in _fr_terms(ctx, p, vf):
            for ixg, cg in gc.coords.items():
                vg, tg = divmod(ixg, ntn)
                tg_digits = _digits(ctx, tg, n)
                for gb_digits, c_gb in _fb_terms(ctx, q, vg):
                    if list(gb_digits[:g_in_f]) != tf_digits[a1:a1 + g_in_f]:
                        continue
                    base = f.mul(f.mul(cf, cg), f.mul(c_fr, c_gb))
                    if f.is_zero(base):
                        continue
                    passthrough_g = list(gb_digits[g_in_f:])
                    w_mid = tf_digits[a1 + g_in_f:]
                    for w_free in itertools.product(range(ctx.dm1), repeat=free):
                        middle = list(f_tail) + passthrough_g + list(w_free)
                        val = bar_d_value(ctx, p + q, [(af, f.one)],
                                          middle, ctx_unit(ctx))
                        w_digits = (tf_digits[:a1] + tg_digits + w_mid
                                    + list(w_free))
                        t_out = _pack(ctx, w_digits)
                        nt_out = ctx.tuple_count(m + n - 1)
                        for kv, cv in val.items():
                            _bump(f, out.coords, kv * nt_out + t_out,
                                  f.mul(base, cv))
    return out


def _bullet_neg(fc: SgCochain, gc: SgCochain, i: int) -> SgCochain:
    ctx = fc.ctx
    f = ctx.field
    m, p = fc.m, fc.p
    n, q = gc.m, gc.p
    ntm = ctx.tuple_count(m)
    ntn = ctx.tuple_count(n)
    out = SgCochain(ctx, m + n - 1, p + q)
    for ixg, cg in gc.coords.items():
        vg, tg = divmod(ixg, ntn)
        tg_digits = _digits(ctx, tg, n)
        for ag, g_tail, c_gr in _fr_terms(ctx, q, vg):
            # B = g_tail (q digits) ++ w_tail (m-1 digits); f eats B[i-1:i-1+m]
            for ixf, cf in fc.coords.items():
                vf, tf = divmod(ixf, ntm)
                tf_digits = _digits(ctx, tf, m)
                ok = True
                w_tail = [None] * (m - 1)
                for pos in range(m):
                    j = i - 1 + pos
                    if j < q:
                        if g_tail[j] != tf_digits[pos]:
                            ok = False
                            break
                    else:
                        w_tail[j - q] = tf_digits[pos]
                if not ok:
                    continue
                free_slots = [j for j in range(m - 1) if w_tail[j] is None]
                base = f.mul(f.mul(cf, cg), c_gr)
                for fb_digits, c_fb in _fb_terms(ctx, p, vf):
                    c1 = f.mul(base, c_fb)
                    if f.is_zero(c1):
                        continue
                    for w_free in itertools.product(range(ctx.dm1),
                                                    repeat=len(free_slots)):
                        wt = list(w_tail)
                        for slot, d_ in zip(free_slots, w_free):
                            wt[slot] = d_
                        B = list(g_tail) + wt
                        middle = B[:i - 1] + list(fb_digits) + B[i - 1 + m:]
                        val = bar_d_value(ctx, p + q, [(ag, f.one)],
                                          middle, ctx_unit(ctx))
                        w_digits = tg_digits + wt
                        t_out = _pack(ctx, w_digits)
                        nt_out = ctx.tuple_count(m + n - 1)
                        for kv, cv in val.items():
                            _bump(f, out.coords, kv * nt_out + t_out,
                                  f.mul(c1, cv))
    return out


def ctx_unit(ctx):
    """The unit of A as a sparse coordinate list in the chosen basis."""
    f = ctx.field
    return [(i, c) for i, c in enumerate(ctx.unit_c) if not f.is_zero(c)]


def bullet(fc: SgCochain, gc: SgCochain) -> SgCochain:
    """f bullet g = signed sum of the bullet_i operations."""
    ctx = fc.ctx
    f = ctx.field
    m, p = fc.m, fc.p
    n, q = gc.m, gc.p
    out = SgCochain(ctx, m + n - 1, p + q)
    for i in range(1, m + 1):
        r_exp = p + q + (i - 1) * (q - n - 1)
        out = out.plus(bullet_i(fc, gc, i).scaled(_sgn(f, r_exp)))
    if q > 0:
        for i in range(1, q + 1):
            s_exp = p + q + (i - 1) * (q - n - 1)
            out = out.plus(bullet_i(fc, gc, -i).scaled(_sgn(f, s_exp)))
    return out


def sg_bracket(fc: SgCochain, gc: SgCochain) -> SgCochain:
    """[f, g]_sg = f bullet g - (-1)^{(m-p-1)(n-q-1)} g bullet f.

    Bidegree-(0, q) arguments are lifted through theta first.
    """
    ctx = fc.ctx
    f = ctx.field
    if fc.m == 0:
        fc = theta_connecting(fc)
    if gc.m == 0:
        gc = theta_connecting(gc)
    m, p = fc.m, fc.p
    n, q = gc.m, gc.p
    fg = bullet(fc, gc)
    gf = bullet(gc, fc)
    return fg.minus(gf.scaled(_sgn(f, (m - p - 1) * (n - q - 1))))


def phi_iso(ctx, p, q, left_val_sparse, right_val_sparse) -> dict:
    """Phi_{p+q} on a pair of ambient values, as ambient Omega^{p+q} coords."""
    f = ctx.field
    out: dict = {}
    if p == 0 and q == 0:
        for k, c in ctx.mul_sparse(left_val_sparse, right_val_sparse):
            _bump(f, out, k, c)
        return out
    for lv, cl in left_val_sparse:
        if p == 0:
            a_l, mid_l, b_l = None, None, None
        for rv, cr in right_val_sparse:
            c = f.mul(cl, cr)
            if p == 0:
                a0 = lv
                a, mid, b = _value_split(ctx, q, rv)
                for k, w in ctx.mult_c[a0][a]:
                    _bump(f, out, _value_join(ctx, q, k, mid, b), f.mul(c, w))
            elif q == 0:
                a, mid, b = _value_split(ctx, p, lv)
                for k, w in ctx.mult_c[b][rv]:
                    _bump(f, out, _value_join(ctx, p, a, mid, k), f.mul(c, w))
            else:
                a, mid_l, x = _value_split(ctx, p, lv)
                b0, mid_r, cc = _value_split(ctx, q, rv)
                prod = ctx.mul_sparse([(x, f.one)], [(b0, f.one)])
                for xk, xc in ctx._pi_sparse(prod):
                    mid = (_pack(ctx, _digits(ctx, mid_l, p - 1) + [xk]
                                 + _digits(ctx, mid_r, q - 1)))
                    _bump(f, out, _value_join(ctx, p + q, a, mid, cc),
                          f.mul(c, f.mul(xc, f.one)))
    return out


def cup_sg(fc: SgCochain, gc: SgCochain) -> SgCochain:
    """f cup_sg g with values pushed through Phi_{p+q}."""
    ctx = fc.ctx
    f = ctx.field
    m, p = fc.m, fc.p
    n, q = gc.m, gc.p
    ntm, ntn = ctx.tuple_count(m), ctx.tuple_count(n)
    nt_out = ctx.tuple_count(m + n)
    out = SgCochain(ctx, m + n, p + q)
    for ixf, cf in fc.coords.items():
        vf, tf = divmod(ixf, ntm)
        for ixg, cg in gc.coords.items():
            vg, tg = divmod(ixg, ntn)
            val = phi_iso(ctx, p, q, [(vf, f.one)], [(vg, f.one)])
            t_out = tf * ntn + tg
            c = f.mul(cf, cg)
            for kv, cv in val.items():
                _bump(f, out.coords, kv * nt_out + t_out, f.mul(c, cv))
    return out


def theta_connecting(fc: SgCochain) -> SgCochain:
    """theta: C^{m}(A, Omega^p) -> C^{m+1}(A, Omega^{p+1}) with sign (-1)^m."""
    ctx = fc.ctx
    f = ctx.field
    m, p = fc.m, fc.p
    ntm = ctx.tuple_count(m)
    nt_out = ctx.tuple_count(m + 1)
    sgn = _sgn(f, m)
    out = SgCochain(ctx, m + 1, p + 1)
    for ixf, cf in fc.coords.items():
        vf, tf = divmod(ixf, ntm)
        for af, tail, c_fr in _fr_terms(ctx, p, vf):
            c0 = f.mul(cf, f.mul(c_fr, sgn))
            for k_new in range(ctx.dm1):
                digits = list(tail) + [k_new]
                val = bar_d_value(ctx, p + 1, [(af, f.one)], digits,
                                  ctx_unit(ctx))
                t_out = tf * ctx.dm1 + k_new
                for kv, cv in val.items():
                    _bump(f, out.coords, kv * nt_out + t_out, f.mul(c0, cv))
    return out


def phi_connecting(fc: SgCochain, complete_degree: int, steps: int = 1) -> SgCochain:
    """Sign-twisted iterate phi^steps starting at fc representing degree
    complete_degree with current coefficient index p = fc.p."""
    ctx = fc.ctx
    f = ctx.field
    i0 = max(0, -complete_degree)
    out = fc
    for _ in range(steps):
        p = out.p
        if p == i0:
            sgn = _sgn(f, complete_degree + i0)
        else:
            sgn = _sgn(f, complete_degree)
        out = theta_connecting(out).scaled(sgn)
    return out


def phi00_closed(ctx, g_vec: dict, p: int) -> SgCochain:
    """phi^p_{0,0}(g)(b_1..b_p) = d_p(g (x) b_1..b_p (x) 1) for g in A."""
    f = ctx.field
    out = SgCochain(ctx, p, p)
    g_sparse = sorted(g_vec.items())
    nt = ctx.tuple_count(p)
    for t in itertools.product(range(ctx.dm1), repeat=p):
        val = bar_d_value(ctx, p, g_sparse, list(t), ctx_unit(ctx))
        t_idx = _pack(ctx, list(t))
        for kv, cv in val.items():
            _bump(f, out.coords, kv * nt + t_idx, cv)
    return out


def kappa(ctx, chain_degree: int, z: dict, p: int) -> SgCochain:
    """kappa_{r-1,p} of a chain z in C_{r-1}(A, A_nu_inv) (r = chain_degree+1):
    (b_1..b_p) |-> sum_i d_{r+p}(u_i nu(a0) (x) t (x) bar(v_i) (x) b (x) 1)."""
    f = ctx.field
    r = chain_degree + 1
    ntc = ctx.tuple_count(chain_degree)
    nt = ctx.tuple_count(p)
    out = SgCochain(ctx, p, r + p)
    for ix, cz in z.items():
        m0, t = divmod(ix, ntc)
        t_digits = _digits(ctx, t, chain_degree)
        nu_m0 = ctx.nu_apply_sparse([(m0, f.one)], 1)
        for u, v in zip(ctx.u_sparse, ctx.v_sparse):
            lead = ctx.mul_sparse(u, nu_m0)
            if not lead:
                continue
            for kv, cv in ctx._pi_sparse(v):
                for b in itertools.product(range(ctx.dm1), repeat=p):
                    digits = t_digits + [kv] + list(b)
                    val = bar_d_value(ctx, r + p, lead, digits, ctx_unit(ctx))
                    t_idx = _pack(ctx, list(b))
                    c0 = f.mul(cz, cv)
                    for kk, cc in val.items():
                        _bump(f, out.coords, kk * nt + t_idx, f.mul(c0, cc))
    return out
