"""Pure-Python hot kernels.

``_speedups.pyx`` is a line-for-line Cython twin of this module; both must
stay behaviourally identical (tests/test_kernels.py runs them side by side).

Terms are ``(key, re, im)`` triples where ``key`` is a packed monomial whose
top field holds the total degree, so ordering keys orders monomials
graded-lexicographically and adding keys multiplies monomials.
"""


def mul_terms(a, b, limit):
    """Product of two term lists sorted by key.

    Monomials with ``key >= limit`` are dropped (``limit=None`` keeps all).
    Returns ``{key: (re, im)}`` without zero entries.
    """
    if not b:
        return {}
    acc_re = {}
    acc_im = {}
    get_re = acc_re.get
    get_im = acc_im.get
    for ka, ar, ai in a:
        if limit is not None and ka + b[0][0] >= limit:
            break
        for kb, br, bi in b:
            k = ka + kb
            if limit is not None and k >= limit:
                break
            if ai:
                if bi:
                    acc_re[k] = get_re(k, 0) + (ar * br - ai * bi)
                    acc_im[k] = get_im(k, 0) + (ar * bi + ai * br)
                else:
                    acc_re[k] = get_re(k, 0) + ar * br
                    acc_im[k] = get_im(k, 0) + ai * br
            elif bi:
                acc_re[k] = get_re(k, 0) + ar * br
                acc_im[k] = get_im(k, 0) + ar * bi
            else:
                acc_re[k] = get_re(k, 0) + ar * br
    out = {}
    for k, re in acc_re.items():
        im = get_im(k)
        if im is None:
            im = 0 * re
        if re or im:
            out[k] = (re, im)
    for k, im in acc_im.items():
        if im and k not in acc_re:
            out[k] = (0 * im, im)
    return out


def row_axpy(target, source, factor, skip):
    """``target -= factor * source`` on sparse rows, ignoring column ``skip``.

    Mutates ``target``; returns ``(added, removed)`` column lists so the caller
    can keep its column index in sync.
    """
    added = []
    removed = []
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
