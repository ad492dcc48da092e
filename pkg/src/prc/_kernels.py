"""Hot kernels for sparse multivariate term arithmetic over F_p.

A polynomial is a batch of terms.  Each term is a row of (variable, exponent)
pairs sorted by variable index, padded on the right with (PAD_VAR, 0), plus an
integer coefficient in [1, p).  Two kernels do all the heavy lifting:

* ``combine_terms``: sort rows, merge duplicates mod p, drop zeros.
* ``mul_rows``: cartesian product of two term batches, merging the pair lists
  of every term pair (raw output, not yet combined).

Everything else (Frobenius, p-th roots, content division) is cheap vectorised
numpy on top of these.

Backend selection: the env var ``PRC_KERNELS`` may be set to ``numba`` or
``numpy``; default is numba when importable, falling back to numpy.  Both
implementations are kept importable side by side (see ``IMPLEMENTATIONS``) so
the benchmark in benchmarks/bench_kernels.py can compare them directly.
"""

from __future__ import annotations

import os

import numpy as np

# Sentinel variable index used to pad term rows; sorts after any real variable.
PAD_VAR = np.int64(1) << 40

_EMPTY_I64 = np.empty((0,), dtype=np.int64)


def _empty_terms(width: int):
    return (
        np.empty((0, width), dtype=np.int64),
        np.empty((0, width), dtype=np.int64),
        _EMPTY_I64,
    )


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _combine_np(tv, te, coeffs, p):
    """Canonicalize raw term rows: lex-sort, merge equal rows mod p, drop zeros."""
    n, width = tv.shape
    if n == 0:
        return _empty_terms(0)
    if width == 0:
        total = int(coeffs.sum() % p)
        if total == 0:
            return _empty_terms(0)
        return (
            np.empty((1, 0), dtype=np.int64),
            np.empty((1, 0), dtype=np.int64),
            np.array([total], dtype=np.int64),
        )
    keys = np.empty((n, 2 * width), dtype=np.int64)
    keys[:, 0::2] = tv
    keys[:, 1::2] = te
    order = np.lexsort(keys.T[::-1])
    keys = keys[order]
    coeffs = coeffs[order]
    if n > 1:
        boundary = np.any(keys[1:] != keys[:-1], axis=1)
        starts = np.concatenate(([0], np.nonzero(boundary)[0] + 1))
    else:
        starts = np.array([0])
    sums = np.add.reduceat(coeffs % p, starts) % p
    keep = sums != 0
    keys = keys[starts[keep]]
    tv = np.ascontiguousarray(keys[:, 0::2])
    te = np.ascontiguousarray(keys[:, 1::2])
    return _trim_width(tv, te, sums[keep])


def _mul_pairs_np(tva, tea, ca, ia, tvb, teb, cb, ib, p):
    """Row-wise products for explicit index pairs (raw, not yet combined)."""
    if ia.shape[0] == 0:
        return _empty_terms(0)
    wa = tva.shape[1]
    wb = tvb.shape[1]
    tv = np.concatenate([tva[ia], tvb[ib]], axis=1)
    te = np.concatenate([tea[ia], teb[ib]], axis=1)
    coeffs = (ca[ia] * cb[ib]) % p
    if wa and wb:
        order = np.argsort(tv, axis=1, kind="stable")
        tv = np.take_along_axis(tv, order, axis=1)
        te = np.take_along_axis(te, order, axis=1)
        # Each variable occurs at most once per operand, so duplicates come in
        # adjacent pairs: fold the right one into the left, re-pad, re-sort.
        dup = (tv[:, 1:] == tv[:, :-1]) & (tv[:, :-1] != PAD_VAR)
        if dup.any():
            te[:, :-1] += np.where(dup, te[:, 1:], 0)
            te[:, 1:] = np.where(dup, 0, te[:, 1:])
            tv[:, 1:] = np.where(dup, PAD_VAR, tv[:, 1:])
            order = np.argsort(tv, axis=1, kind="stable")
            tv = np.take_along_axis(tv, order, axis=1)
            te = np.take_along_axis(te, order, axis=1)
    return tv, te, coeffs


def _mul_rows_np(tva, tea, ca, tvb, teb, cb, p):
    """Raw term-by-term products over the full cartesian pairing."""
    na = tva.shape[0]
    nb = tvb.shape[0]
    if na == 0 or nb == 0:
        return _empty_terms(0)
    ia = np.repeat(np.arange(na), nb)
    ib = np.tile(np.arange(nb), na)
    return _mul_pairs_np(tva, tea, ca, ia, tvb, teb, cb, ib, p)


def _mul_blocks_np(tva, tea, ca, tvb, teb, cb, astart, acnt, bstart, bcnt, jout, p):
    """Products over rectangular row blocks; block k pairs rows
    astart[k]:astart[k]+acnt[k] with bstart[k]:bstart[k]+bcnt[k] and tags the
    results with output bucket jout[k].  Returns (tv, te, coeffs, outj)."""
    sz = acnt * bcnt
    total = int(sz.sum())
    if total == 0:
        return (*_empty_terms(tva.shape[1] + tvb.shape[1]), _EMPTY_I64)
    ends = np.cumsum(sz)
    gid = np.repeat(np.arange(sz.shape[0]), sz)
    local = np.arange(total) - np.repeat(ends - sz, sz)
    nb = bcnt[gid]
    ia = astart[gid] + local // nb
    ib = bstart[gid] + local % nb
    tv, te, coeffs = _mul_pairs_np(tva, tea, ca, ia, tvb, teb, cb, ib, p)
    return tv, te, coeffs, jout[gid]


def _convolve_np(tv, te, coeffs, outj, n, p):
    """Combine raw rows bucketed by output index.

    Returns (tv, te, coeffs, bounds) where rows bounds[j]:bounds[j+1] are the
    canonical combined terms of output bucket j.
    """
    total, width = tv.shape
    if total == 0:
        return (*_empty_terms(width), np.zeros(n + 1, dtype=np.int64))
    if width == 0:
        sums = np.bincount(outj, weights=coeffs % p, minlength=n).astype(np.int64) % p
        keep = np.nonzero(sums)[0]
        m = keep.shape[0]
        bounds = np.searchsorted(keep, np.arange(n + 1))
        return (
            np.empty((m, 0), dtype=np.int64),
            np.empty((m, 0), dtype=np.int64),
            sums[keep],
            bounds,
        )
    keys = np.empty((total, 2 * width + 1), dtype=np.int64)
    keys[:, 0] = outj
    keys[:, 1::2] = tv
    keys[:, 2::2] = te
    order = np.lexsort(keys.T[::-1])
    keys = keys[order]
    coeffs = coeffs[order]
    if total > 1:
        boundary = np.any(keys[1:] != keys[:-1], axis=1)
        starts = np.concatenate(([0], np.nonzero(boundary)[0] + 1))
    else:
        starts = np.array([0])
    sums = np.add.reduceat(coeffs % p, starts) % p
    keep = sums != 0
    keys = keys[starts[keep]]
    out_tv = np.ascontiguousarray(keys[:, 1::2])
    out_te = np.ascontiguousarray(keys[:, 2::2])
    bounds = np.searchsorted(keys[:, 0], np.arange(n + 1))
    return out_tv, out_te, sums[keep], bounds


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _trim_width(tv, te, coeffs):
    """Drop all-padding columns on the right."""
    n, width = tv.shape
    if n == 0:
        return _empty_terms(0)
    used = np.nonzero((tv != PAD_VAR).any(axis=0))[0]
    keep = 0 if used.size == 0 else int(used[-1]) + 1
    if keep != width:
        tv = np.ascontiguousarray(tv[:, :keep])
        te = np.ascontiguousarray(te[:, :keep])
    return tv, te, coeffs


def pad_rows(tv, te, width):
    """Pad term rows with (PAD_VAR, 0) columns up to the given width."""
    n, old = tv.shape
    if old == width:
        return tv, te
    tv2 = np.full((n, width), PAD_VAR, dtype=np.int64)
    te2 = np.zeros((n, width), dtype=np.int64)
    tv2[:, :old] = tv
    te2[:, :old] = te
    return tv2, te2


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

def _build_numba():
    from numba import njit

    @njit(cache=True)
    def _row_lt(keys, i, j):
        for k in range(keys.shape[1]):
            if keys[i, k] < keys[j, k]:
                return True
            if keys[i, k] > keys[j, k]:
                return False
        return False

    @njit(cache=True)
    def _row_eq(keys, i, j):
        for k in range(keys.shape[1]):
            if keys[i, k] != keys[j, k]:
                return False
        return True

    @njit(cache=True)
    def _sort_rows(keys):
        n = keys.shape[0]
        idx = np.arange(n)
        buf = np.empty(n, dtype=np.int64)
        width = 1
        while width < n:
            for lo in range(0, n, 2 * width):
                mid = min(lo + width, n)
                hi = min(lo + 2 * width, n)
                a, b, k = lo, mid, lo
                while a < mid and b < hi:
                    if _row_lt(keys, idx[b], idx[a]):
                        buf[k] = idx[b]
                        b += 1
                    else:
                        buf[k] = idx[a]
                        a += 1
                    k += 1
                while a < mid:
                    buf[k] = idx[a]
                    a += 1
                    k += 1
                while b < hi:
                    buf[k] = idx[b]
                    b += 1
                    k += 1
                for k2 in range(lo, hi):
                    idx[k2] = buf[k2]
            width *= 2
        return idx

    @njit(cache=True)
    def _combine_nb(tv, te, coeffs, p):
        n, width = tv.shape
        keys = np.empty((n, 2 * width), dtype=np.int64)
        for i in range(n):
            for k in range(width):
                keys[i, 2 * k] = tv[i, k]
                keys[i, 2 * k + 1] = te[i, k]
        idx = _sort_rows(keys)
        out_tv = np.empty((n, width), dtype=np.int64)
        out_te = np.empty((n, width), dtype=np.int64)
        out_c = np.empty(n, dtype=np.int64)
        m = 0
        i = 0
        while i < n:
            j = i
            total = 0
            while j < n and _row_eq(keys, idx[i], idx[j]):
                total = (total + coeffs[idx[j]]) % p
                j += 1
            if total != 0:
                r = idx[i]
                for k in range(width):
                    out_tv[m, k] = tv[r, k]
                    out_te[m, k] = te[r, k]
                out_c[m] = total
                m += 1
            i = j
        return out_tv[:m].copy(), out_te[:m].copy(), out_c[:m].copy()

    @njit(cache=True)
    def _mul_pairs_nb(tva, tea, ca, ia, tvb, teb, cb, ib, p):
        wa = tva.shape[1]
        wb = tvb.shape[1]
        width = wa + wb
        n = ia.shape[0]
        tv = np.full((n, width), PAD_VAR, dtype=np.int64)
        te = np.zeros((n, width), dtype=np.int64)
        coeffs = np.empty(n, dtype=np.int64)
        for r in range(n):
            i = ia[r]
            j = ib[r]
            x = 0
            y = 0
            k = 0
            while x < wa or y < wb:
                va = tva[i, x] if x < wa else PAD_VAR
                vb = tvb[j, y] if y < wb else PAD_VAR
                if va == PAD_VAR and vb == PAD_VAR:
                    break
                if va < vb:
                    tv[r, k] = va
                    te[r, k] = tea[i, x]
                    x += 1
                elif vb < va:
                    tv[r, k] = vb
                    te[r, k] = teb[j, y]
                    y += 1
                else:
                    tv[r, k] = va
                    te[r, k] = tea[i, x] + teb[j, y]
                    x += 1
                    y += 1
                k += 1
            coeffs[r] = (ca[i] * cb[j]) % p
        return tv, te, coeffs

    @njit(cache=True)
    def _pair_lt(tv, te, i, j):
        for k in range(tv.shape[1]):
            if tv[i, k] != tv[j, k]:
                return tv[i, k] < tv[j, k]
            if te[i, k] != te[j, k]:
                return te[i, k] < te[j, k]
        return False

    @njit(cache=True)
    def _pair_eq(tv, te, i, j):
        for k in range(tv.shape[1]):
            if tv[i, k] != tv[j, k] or te[i, k] != te[j, k]:
                return False
        return True

    @njit(cache=True)
    def _sort_idx(tv, te, order, lo, hi, buf):
        n = hi - lo
        width = 1
        while width < n:
            for start in range(lo, hi, 2 * width):
                mid = min(start + width, hi)
                end = min(start + 2 * width, hi)
                a, b, k = start, mid, start
                while a < mid and b < end:
                    if _pair_lt(tv, te, order[b], order[a]):
                        buf[k] = order[b]
                        b += 1
                    else:
                        buf[k] = order[a]
                        a += 1
                    k += 1
                while a < mid:
                    buf[k] = order[a]
                    a += 1
                    k += 1
                while b < end:
                    buf[k] = order[b]
                    b += 1
                    k += 1
                for k2 in range(start, end):
                    order[k2] = buf[k2]
            width *= 2

    @njit(cache=True)
    def _convolve_nb(tv, te, coeffs, outj, n, p):
        total, width = tv.shape
        offs = np.zeros(n + 1, dtype=np.int64)
        for r in range(total):
            offs[outj[r] + 1] += 1
        for j in range(n):
            offs[j + 1] += offs[j]
        already_sorted = True
        for r in range(1, total):
            if outj[r] < outj[r - 1]:
                already_sorted = False
                break
        order = np.arange(total)
        if not already_sorted:
            pos = offs[:-1].copy()
            for r in range(total):
                j = outj[r]
                order[pos[j]] = r
                pos[j] += 1
        buf = np.empty(total, dtype=np.int64)
        out_tv = np.empty((total, width), dtype=np.int64)
        out_te = np.empty((total, width), dtype=np.int64)
        out_c = np.empty(total, dtype=np.int64)
        bounds = np.zeros(n + 1, dtype=np.int64)
        m = 0
        for j in range(n):
            lo, hi = offs[j], offs[j + 1]
            if hi > lo:
                _sort_idx(tv, te, order, lo, hi, buf)
                i = lo
                while i < hi:
                    r0 = order[i]
                    tot = 0
                    k2 = i
                    while k2 < hi and _pair_eq(tv, te, order[k2], r0):
                        tot = (tot + coeffs[order[k2]]) % p
                        k2 += 1
                    if tot != 0:
                        for k in range(width):
                            out_tv[m, k] = tv[r0, k]
                            out_te[m, k] = te[r0, k]
                        out_c[m] = tot
                        m += 1
                    i = k2
            bounds[j + 1] = m
        return out_tv[:m].copy(), out_te[:m].copy(), out_c[:m].copy(), bounds

    @njit(cache=True)
    def _mul_blocks_nb(tva, tea, ca, tvb, teb, cb, astart, acnt, bstart, bcnt, jout, total, p):
        wa = tva.shape[1]
        wb = tvb.shape[1]
        width = wa + wb
        tv = np.full((total, width), PAD_VAR, dtype=np.int64)
        te = np.zeros((total, width), dtype=np.int64)
        coeffs = np.empty(total, dtype=np.int64)
        outj = np.empty(total, dtype=np.int64)
        r = 0
        for blk in range(astart.shape[0]):
            j0 = jout[blk]
            for i in range(astart[blk], astart[blk] + acnt[blk]):
                for j in range(bstart[blk], bstart[blk] + bcnt[blk]):
                    x = 0
                    y = 0
                    k = 0
                    while x < wa or y < wb:
                        va = tva[i, x] if x < wa else PAD_VAR
                        vb = tvb[j, y] if y < wb else PAD_VAR
                        if va == PAD_VAR and vb == PAD_VAR:
                            break
                        if va < vb:
                            tv[r, k] = va
                            te[r, k] = tea[i, x]
                            x += 1
                        elif vb < va:
                            tv[r, k] = vb
                            te[r, k] = teb[j, y]
                            y += 1
                        else:
                            tv[r, k] = va
                            te[r, k] = tea[i, x] + teb[j, y]
                            x += 1
                            y += 1
                        k += 1
                    coeffs[r] = (ca[i] * cb[j]) % p
                    outj[r] = j0
                    r += 1
        return tv, te, coeffs, outj

    def mul_blocks(tva, tea, ca, tvb, teb, cb, astart, acnt, bstart, bcnt, jout, p):
        total = int((acnt * bcnt).sum())
        if total == 0:
            return (*_empty_terms(tva.shape[1] + tvb.shape[1]), _EMPTY_I64)
        if tva.shape[1] == 0 or tvb.shape[1] == 0:
            return _mul_blocks_np(
                tva, tea, ca, tvb, teb, cb, astart, acnt, bstart, bcnt, jout, p
            )
        return _mul_blocks_nb(
            tva, tea, ca, tvb, teb, cb, astart, acnt, bstart, bcnt, jout, total, p
        )

    def convolve_combine(tv, te, coeffs, outj, n, p):
        total, width = tv.shape
        if total == 0 or width == 0:
            return _convolve_np(tv, te, coeffs, outj, n, p)
        return _convolve_nb(tv, te, coeffs, outj, n, p)

    def combine(tv, te, coeffs, p):
        n, width = tv.shape
        if n == 0 or width == 0:
            return _combine_np(tv, te, coeffs, p)
        out = _combine_nb(tv, te, coeffs, p)
        return _trim_width(*out)

    def mul_pairs(tva, tea, ca, ia, tvb, teb, cb, ib, p):
        if ia.shape[0] == 0:
            return _empty_terms(0)
        if tva.shape[1] == 0 or tvb.shape[1] == 0:
            return _mul_pairs_np(tva, tea, ca, ia, tvb, teb, cb, ib, p)
        return _mul_pairs_nb(tva, tea, ca, ia, tvb, teb, cb, ib, p)

    def mul_rows(tva, tea, ca, tvb, teb, cb, p):
        na = tva.shape[0]
        nb = tvb.shape[0]
        if na == 0 or nb == 0:
            return _empty_terms(0)
        ia = np.repeat(np.arange(na), nb)
        ib = np.tile(np.arange(nb), na)
        return mul_pairs(tva, tea, ca, ia, tvb, teb, cb, ib, p)

    return {
        "combine": combine,
        "mul_rows": mul_rows,
        "mul_pairs": mul_pairs,
        "mul_blocks": mul_blocks,
        "convolve": convolve_combine,
    }


def _combine_np_entry(tv, te, coeffs, p):
    return _combine_np(tv, te, coeffs, p)


IMPLEMENTATIONS = {
    "numpy": {
        "combine": _combine_np_entry,
        "mul_rows": _mul_rows_np,
        "mul_pairs": _mul_pairs_np,
        "mul_blocks": _mul_blocks_np,
        "convolve": _convolve_np,
    },
}

_requested = os.environ.get("PRC_KERNELS", "").strip().lower()
BACKEND = "numpy"
if _requested != "numpy":
    try:
        IMPLEMENTATIONS["numba"] = _build_numba()
        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise

combine_terms = IMPLEMENTATIONS[BACKEND]["combine"]
mul_rows = IMPLEMENTATIONS[BACKEND]["mul_rows"]
mul_pairs = IMPLEMENTATIONS[BACKEND]["mul_pairs"]
mul_blocks = IMPLEMENTATIONS[BACKEND]["mul_blocks"]
convolve_combine = IMPLEMENTATIONS[BACKEND]["convolve"]
