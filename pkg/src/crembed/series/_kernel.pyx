# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled series kernels; semantics identical to ``_kernel_py``."""


def mul_terms(tuple ak, tuple ad, tuple ag, tuple ar, tuple ai,
              tuple bk, tuple bd, tuple bg, tuple br, tuple bi,
              int cap, tuple gcaps):
    cdef Py_ssize_t na = len(ak)
    cdef Py_ssize_t nb = len(bk)
    cdef Py_ssize_t ng = len(gcaps)
    cdef Py_ssize_t i, j, g, gi, gj
    cdef int da, d, bd0
    cdef bint ok
    cdef int gc[16]
    cdef dict acc = {}
    cdef list slot
    cdef int[:] bdeg
    cdef int[:] agd
    cdef int[:] bgd
    if nb == 0:
        return acc
    if ng > 16:
        raise ValueError("too many group caps")
    for g in range(ng):
        gc[g] = gcaps[g]
    import array
    bdeg = array.array("i", bd)
    agd = array.array("i", ag) if ng else array.array("i", [0])
    bgd = array.array("i", bg) if ng else array.array("i", [0])
    bd0 = bdeg[0]
    for i in range(na):
        da = ad[i]
        if da + bd0 > cap:
            break
        x = ar[i]
        y = ai[i]
        ka = ak[i]
        gi = i * ng
        for j in range(nb):
            d = da + bdeg[j]
            if d > cap:
                break
            if ng:
                gj = j * ng
                ok = True
                for g in range(ng):
                    if agd[gi + g] + bgd[gj + g] > gc[g]:
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
                slot[0] = slot[0] + rr
                slot[1] = slot[1] + ii
    return acc
