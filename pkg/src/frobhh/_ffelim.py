"""Streaming sparse row echelon over finite fields on dense integer codes.

Rows live in a space of dimension `space_dim`; as each row arrives it is
reduced against the stored pivot rows (min-column pivoting, a lazy binary
heap orders the fill) and either vanishes or becomes a new normalized pivot
row.  All arithmetic goes through q*q lookup tables, so the same kernels
serve F_p and small F_{p^k}.  Deterministic for a fixed row order.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except Exception:  # pragma: no cover - numba is a hard dep, but stay runnable
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


@njit(cache=True)
def _heap_push(heap, n, col, in_heap):
    if in_heap[col]:
        return n
    in_heap[col] = 1
    heap[n] = col
    i = n
    n += 1
    while i > 0:
        par = (i - 1) >> 1
        if heap[par] <= heap[i]:
            break
        heap[par], heap[i] = heap[i], heap[par]
        i = par
    return n


@njit(cache=True)
def _heap_pop(heap, n, in_heap):
    top = heap[0]
    in_heap[top] = 0
    n -= 1
    heap[0] = heap[n]
    i = 0
    while True:
        l = 2 * i + 1
        r = l + 1
        small = i
        if l < n and heap[l] < heap[small]:
            small = l
        if r < n and heap[r] < heap[small]:
            small = r
        if small == i:
            break
        heap[i], heap[small] = heap[small], heap[i]
        i = small
    return top, n


@njit(cache=True)
def _install_rows(rows_indptr, rows_cols, rows_vals,
                  add_tab, mul_tab, neg_tab, inv_tab,
                  piv_of_col, pool_indptr, pool_cols, pool_vals,
                  n_pool, pool_nnz,
                  ws, in_heap, heap):
    """Reduce each row and install nonzero survivors as pivot rows.

    Returns (n_pool, pool_nnz, new_rank, failed_at); failed_at >= 0 means
    the pool overflowed before processing row failed_at (caller grows the
    pool and retries from there).
    """
    nrows = rows_indptr.shape[0] - 1
    new_rank = 0
    for ri in range(nrows):
        heap_n = 0
        for k in range(rows_indptr[ri], rows_indptr[ri + 1]):
            c = rows_cols[k]
            v = rows_vals[k]
            if in_heap[c]:
                ws[c] = add_tab[ws[c], v]
            else:
                ws[c] = v
                heap_n = _heap_push(heap, heap_n, c, in_heap)
        pivot_col = np.int64(-1)
        pivot_val = np.uint16(0)
        while heap_n > 0:
            c, heap_n = _heap_pop(heap, heap_n, in_heap)
            v = ws[c]
            ws[c] = 0
            if v == 0:
                continue
            pr = piv_of_col[c]
            if pr < 0:
                pivot_col = c
                pivot_val = v
                break
            f = v
            for k in range(pool_indptr[pr] + 1, pool_indptr[pr + 1]):
                cc = pool_cols[k]
                delta = neg_tab[mul_tab[f, pool_vals[k]]]
                if in_heap[cc]:
                    ws[cc] = add_tab[ws[cc], delta]
                else:
                    ws[cc] = delta
                    heap_n = _heap_push(heap, heap_n, cc, in_heap)
        if pivot_col >= 0:
            if pool_nnz + heap_n + 1 > pool_cols.shape[0]:
                # not enough pool left for this row: clean up and report
                while heap_n > 0:
                    c, heap_n = _heap_pop(heap, heap_n, in_heap)
                    ws[c] = 0
                ws[pivot_col] = 0
                # reinstate the unprocessed row by reporting its index
                return n_pool, pool_nnz, new_rank, ri
            inv_lead = inv_tab[pivot_val]
            pool_cols[pool_nnz] = pivot_col
            pool_vals[pool_nnz] = 1
            pool_nnz += 1
            while heap_n > 0:
                c, heap_n = _heap_pop(heap, heap_n, in_heap)
                v = ws[c]
                ws[c] = 0
                if v == 0:
                    continue
                pool_cols[pool_nnz] = c
                pool_vals[pool_nnz] = mul_tab[inv_lead, v]
                pool_nnz += 1
            piv_of_col[pivot_col] = n_pool
            pool_indptr[n_pool + 1] = pool_nnz
            n_pool += 1
            new_rank += 1
    return n_pool, pool_nnz, new_rank, -1


@njit(cache=True)
def _reduce_row(cols, vals,
                add_tab, mul_tab, neg_tab,
                piv_of_col, pool_indptr, pool_cols, pool_vals,
                ws, in_heap, heap,
                out_cols, out_vals):
    """Residual of one row modulo the pivot rows; returns residual length."""
    heap_n = 0
    for k in range(cols.shape[0]):
        c = cols[k]
        v = vals[k]
        if in_heap[c]:
            ws[c] = add_tab[ws[c], v]
        else:
            ws[c] = v
            heap_n = _heap_push(heap, heap_n, c, in_heap)
    out_n = 0
    while heap_n > 0:
        c, heap_n = _heap_pop(heap, heap_n, in_heap)
        v = ws[c]
        ws[c] = 0
        if v == 0:
            continue
        pr = piv_of_col[c]
        if pr < 0:
            out_cols[out_n] = c
            out_vals[out_n] = v
            out_n += 1
            continue
        f = v
        for k in range(pool_indptr[pr] + 1, pool_indptr[pr + 1]):
            cc = pool_cols[k]
            delta = neg_tab[mul_tab[f, pool_vals[k]]]
            if in_heap[cc]:
                ws[cc] = add_tab[ws[cc], delta]
            else:
                ws[cc] = delta
                heap_n = _heap_push(heap, heap_n, cc, in_heap)
    return out_n


@njit(cache=True)
def _back_substitute(free_col, piv_cols_desc, piv_of_col,
                     pool_indptr, pool_cols, pool_vals,
                     add_tab, mul_tab, neg_tab,
                     x, touched):
    """Kernel vector with x[free_col] = 1 for a row echelon of a matrix."""
    nt = 0
    x[free_col] = 1
    touched[nt] = free_col
    nt += 1
    for pi in range(piv_cols_desc.shape[0]):
        c = piv_cols_desc[pi]
        pr = piv_of_col[c]
        acc = np.uint16(0)
        for k in range(pool_indptr[pr] + 1, pool_indptr[pr + 1]):
            cc = pool_cols[k]
            if x[cc] != 0:
                acc = add_tab[acc, mul_tab[pool_vals[k], x[cc]]]
        if acc != 0:
            x[c] = neg_tab[acc]
            touched[nt] = c
            nt += 1
    return nt


class CodeEchelon:
    """Row echelon accumulator over a finite field, indexed by codes."""

    def __init__(self, field, space_dim: int):
        if field.size is None or field.size > 65535:
            raise ValueError("CodeEchelon requires a small finite field")
        self.field = field
        self.space_dim = space_dim
        self.add_tab, self.mul_tab, self.neg_tab, self.inv_tab = _tables_for(field)
        self.piv_of_col = np.full(space_dim, -1, dtype=np.int64)
        self._indptr_cap = 1024
        self.pool_indptr = np.zeros(self._indptr_cap + 1, dtype=np.int64)
        self.pool_cols = np.empty(4096, dtype=np.int64)
        self.pool_vals = np.empty(4096, dtype=np.uint16)
        self.n_pool = 0
        self.pool_nnz = 0
        self.ws = np.zeros(space_dim, dtype=np.uint16)
        self.in_heap = np.zeros(space_dim, dtype=np.uint8)
        self.heap = np.empty(space_dim + 1, dtype=np.int64)
        self._out_cols = np.empty(space_dim, dtype=np.int64)
        self._out_vals = np.empty(space_dim, dtype=np.uint16)

    @property
    def rank(self) -> int:
        return self.n_pool

    def _grow_pool(self, needed_nnz):
        cap = self.pool_cols.shape[0]
        while cap < needed_nnz:
            cap *= 2
        if cap != self.pool_cols.shape[0]:
            nc = np.empty(cap, dtype=np.int64)
            nv = np.empty(cap, dtype=np.uint16)
            nc[: self.pool_nnz] = self.pool_cols[: self.pool_nnz]
            nv[: self.pool_nnz] = self.pool_vals[: self.pool_nnz]
            self.pool_cols, self.pool_vals = nc, nv

    def _grow_indptr(self, needed_rows):
        if needed_rows > self._indptr_cap:
            while self._indptr_cap < needed_rows:
                self._indptr_cap *= 2
            np_ = np.zeros(self._indptr_cap + 1, dtype=np.int64)
            np_[: self.n_pool + 1] = self.pool_indptr[: self.n_pool + 1]
            self.pool_indptr = np_

    def add_rows(self, indptr, cols, vals) -> int:
        """Insert a CSR batch of rows as pivots; returns the rank increase."""
        indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        cols = np.ascontiguousarray(cols, dtype=np.int64)
        vals = np.ascontiguousarray(vals, dtype=np.uint16)
        total = 0
        start_row = 0
        nrows = indptr.shape[0] - 1
        while start_row < nrows:
            batch_nnz = int(indptr[-1] - indptr[start_row])
            self._grow_indptr(self.n_pool + (nrows - start_row))
            self._grow_pool(self.pool_nnz + 2 * batch_nnz + self.space_dim + 1024)
            sub = (indptr[start_row:] - indptr[start_row]).astype(np.int64)
            n_pool, pool_nnz, inc, failed_at = _install_rows(
                sub, cols[indptr[start_row]:], vals[indptr[start_row]:],
                self.add_tab, self.mul_tab, self.neg_tab, self.inv_tab,
                self.piv_of_col, self.pool_indptr, self.pool_cols, self.pool_vals,
                self.n_pool, self.pool_nnz,
                self.ws, self.in_heap, self.heap)
            self.n_pool, self.pool_nnz = n_pool, pool_nnz
            total += inc
            if failed_at < 0:
                break
            start_row += failed_at
            self._grow_pool(2 * self.pool_cols.shape[0])
        return total

    def add_row_dict(self, vec: dict) -> bool:
        if not vec:
            return False
        items = sorted(vec.items())
        indptr = np.array([0, len(items)], dtype=np.int64)
        cols = np.array([c for c, _ in items], dtype=np.int64)
        vals = np.array([self.field.code(v) for _, v in items], dtype=np.uint16)
        return self.add_rows(indptr, cols, vals) == 1

    def reduce_codes(self, cols, vals):
        """Residual of one row after reduction (no pivot installed)."""
        cols = np.ascontiguousarray(cols, dtype=np.int64)
        vals = np.ascontiguousarray(vals, dtype=np.uint16)
        n = _reduce_row(cols, vals,
                        self.add_tab, self.mul_tab, self.neg_tab,
                        self.piv_of_col, self.pool_indptr, self.pool_cols,
                        self.pool_vals, self.ws, self.in_heap, self.heap,
                        self._out_cols, self._out_vals)
        return self._out_cols[:n].copy(), self._out_vals[:n].copy()

    def reduce_dict(self, vec: dict) -> dict:
        if not vec:
            return {}
        items = sorted(vec.items())
        cols = np.array([c for c, _ in items], dtype=np.int64)
        vals = np.array([self.field.code(v) for _, v in items], dtype=np.uint16)
        rc, rv = self.reduce_codes(cols, vals)
        f = self.field
        return {int(c): f.decode(int(v)) for c, v in zip(rc, rv)}

    def contains(self, vec: dict) -> bool:
        return not self.reduce_dict(vec)

    def pivot_cols(self):
        return np.flatnonzero(self.piv_of_col >= 0)

    def kernel_vector(self, free_col: int) -> dict:
        """x with x[free_col]=1 solving (rows)·x = 0; rows must form M's echelon."""
        piv_desc = np.sort(self.pivot_cols())[::-1].astype(np.int64)
        x = np.zeros(self.space_dim, dtype=np.uint16)
        touched = np.empty(self.space_dim + 1, dtype=np.int64)
        nt = _back_substitute(free_col, piv_desc, self.piv_of_col,
                              self.pool_indptr, self.pool_cols, self.pool_vals,
                              self.add_tab, self.mul_tab, self.neg_tab,
                              x, touched)
        f = self.field
        out = {}
        for i in range(nt):
            c = int(touched[i])
            if x[c]:
                out[c] = f.decode(int(x[c]))
            x[c] = 0
        return out

    @property
    def pool_bytes(self) -> int:
        return int(self.pool_cols.shape[0] * 10)


_TABLE_CACHE: dict = {}


def _tables_for(field):
    key = field.spec
    if key not in _TABLE_CACHE:
        q = field.size
        add = np.zeros((q, q), dtype=np.uint16)
        mul = np.zeros((q, q), dtype=np.uint16)
        neg = np.zeros(q, dtype=np.uint16)
        inv = np.zeros(q, dtype=np.uint16)
        els = [field.decode(c) for c in range(q)]
        for i, a in enumerate(els):
            neg[i] = field.code(field.neg(a))
            if i:
                inv[i] = field.code(field.inv(a))
            for j, b in enumerate(els):
                add[i, j] = field.code(field.add(a, b))
                mul[i, j] = field.code(field.mul(a, b))
        _TABLE_CACHE[key] = (add, mul, neg, inv)
    return _TABLE_CACHE[key]


class PyEchelon:
    """Field-generic fallback with the same interface, dict-based rows."""

    def __init__(self, field, space_dim: int):
        self.field = field
        self.space_dim = space_dim
        self.piv = {}          # col -> row dict (normalized, lead coeff 1)

    @property
    def rank(self) -> int:
        return len(self.piv)

    def _reduce(self, vec: dict, install: bool):
        import heapq

        f = self.field
        ws = dict(vec)
        heap = sorted(ws.keys())
        seen = set(heap)
        residual = {}
        while heap:
            c = heapq.heappop(heap)
            seen.discard(c)
            v = ws.pop(c, f.zero)
            if f.is_zero(v):
                continue
            row = self.piv.get(c)
            if row is None:
                if install:
                    inv = f.inv(v)
                    newrow = {c: f.one}
                    for cc, vv in ws.items():
                        if not f.is_zero(vv):
                            newrow[cc] = f.mul(inv, vv)
                    self.piv[c] = newrow
                    return True, {}
                residual[c] = v
                continue
            for cc, vv in row.items():
                if cc == c:
                    continue
                nv = f.sub(ws.get(cc, f.zero), f.mul(v, vv))
                if f.is_zero(nv):
                    ws.pop(cc, None)
                else:
                    ws[cc] = nv
                    if cc not in seen:
                        heapq.heappush(heap, cc)
                        seen.add(cc)
        return False, residual

    def add_row_dict(self, vec: dict) -> bool:
        vec = {c: v for c, v in vec.items() if not self.field.is_zero(v)}
        if not vec:
            return False
        became, _ = self._reduce(vec, True)
        return became

    def reduce_dict(self, vec: dict) -> dict:
        _, res = self._reduce(vec, False)
        return res

    def contains(self, vec: dict) -> bool:
        return not self.reduce_dict(vec)

    def pivot_cols(self):
        return sorted(self.piv.keys())

    def kernel_vector(self, free_col: int) -> dict:
        f = self.field
        x = {free_col: f.one}
        for c in sorted(self.piv.keys(), reverse=True):
            row = self.piv[c]
            acc = f.zero
            for cc, vv in row.items():
                if cc == c:
                    continue
                xv = x.get(cc)
                if xv is not None:
                    acc = f.add(acc, f.mul(vv, xv))
            if not f.is_zero(acc):
                x[c] = f.neg(acc)
        return {c: v for c, v in x.items() if not f.is_zero(v)}


def new_echelon(field, space_dim: int, force_python: bool = False):
    if (not force_python and HAVE_NUMBA
            and field.size is not None and field.size <= 65535):
        return CodeEchelon(field, space_dim)
    return PyEchelon(field, space_dim)
