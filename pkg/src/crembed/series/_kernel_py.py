"""Pure-Python series kernels; mirrors ``_kernel.pyx`` line for line."""


def mul_terms(ak, ad, ag, ar, ai, bk, bd, bg, br, bi, cap, gcaps):
    """Truncated product of two term lists.

    Term lists are sorted by total degree.  ``ag``/``bg`` hold group degrees
    flattened row-major.  Returns ``{key: [re, im, i, j]}`` where ``(i, j)`` is
    one contributing pair, used by the caller to recover group degrees.
    """
    acc = {}
    nb = len(bk)
    ng = len(gcaps)
    if not nb:
        return acc
    bd0 = bd[0]
    for i in range(len(ak)):
        da = ad[i]
        if da + bd0 > cap:
            break
        x = ar[i]
        y = ai[i]
        ka = ak[i]
        gi = i * ng
        for j in range(nb):
            d = da + bd[j]
            if d > cap:
                break
            if ng:
                gj = j * ng
                ok = True
                for g in range(ng):
                    if ag[gi + g] + bg[gj + g] > gcaps[g]:
                        ok = False
                        break
                if not ok:
                    continue
            u = br[j]
            v = bi[j]
            if y == 0:
                rr = x * u
                ii = x * v
            elif v == 0:
                rr = x * u
                ii = y * u
            else:
                rr = x * u - y * v
                ii = x * v + y * u
            k = ka + bk[j]
            slot = acc.get(k)
            if slot is None:
                acc[k] = [rr, ii, i, j]
            else:
                slot[0] += rr
                slot[1] += ii
    return acc
