# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``leviflat._kernels``; see that module for the contracts."""


def mul_terms(list a, list b, limit):
    cdef dict acc_re = {}
    cdef dict acc_im = {}
    cdef dict out = {}
    cdef Py_ssize_t ia, ib, na = len(a), nb = len(b)
    cdef tuple ta, tb
    cdef object ka, ar, ai, kb, br, bi, k, re, im
    cdef bint truncate = limit is not None
    cdef bint a_im, b_im
    if nb == 0:
        return out
    for ia in range(na):
        ta = <tuple>a[ia]
        ka = ta[0]
        ar = ta[1]
        ai = ta[2]
        if truncate and ka + (<tuple>b[0])[0] >= limit:
            break
        a_im = bool(ai)
        for ib in range(nb):
            tb = <tuple>b[ib]
            kb = tb[0]
            k = ka + kb
            if truncate and k >= limit:
                break
            br = tb[1]
            bi = tb[2]
            b_im = bool(bi)
            if a_im:
                if b_im:
                    acc_re[k] = acc_re.get(k, 0) + (ar * br - ai * bi)
                    acc_im[k] = acc_im.get(k, 0) + (ar * bi + ai * br)
                else:
                    acc_re[k] = acc_re.get(k, 0) + ar * br
                    acc_im[k] = acc_im.get(k, 0) + ai * br
            elif b_im:
                acc_re[k] = acc_re.get(k, 0) + ar * br
                acc_im[k] = acc_im.get(k, 0) + ar * bi
            else:
                acc_re[k] = acc_re.get(k, 0) + ar * br
    for k, re in acc_re.items():
        im = acc_im.get(k)
        if im is None:
            im = 0 * re
        if re or im:
            out[k] = (re, im)
    for k, im in acc_im.items():
        if im and k not in acc_re:
            out[k] = (0 * im, im)
    return out


def row_axpy(dict target, dict source, factor, skip):
    cdef list added = []
    cdef list removed = []
    cdef object col, val, old, new
    for col, val in source.items():
        if col == skip:
            continue
        old = target.get(col)
        if old is None:
            target[col] = -factor * val
            added.append(col)
        else:
            new = old - factor * val
            if new:
                target[col] = new
            else:
                del target[col]
                removed.append(col)
    return added, removed
