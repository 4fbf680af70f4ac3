# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled run-length scan over altitude series.

Semantics are defined by goaround._kernels_py.scan_candidates; the two
implementations must agree sample-for-sample.
"""

BACKEND = "compiled"


def scan_candidates(const double[::1] alt, const unsigned char[::1] in_terminal,
                    int descent_run, int climb_run, bint strict):
    """Indices i where a descent run ends and a climb run starts."""
    cdef Py_ssize_t n = alt.shape[0]
    cdef list out = []
    cdef Py_ssize_t i, j
    cdef double d
    cdef bint ok, has_neg, has_pos
    if n < descent_run + climb_run + 1:
        return out
    for i in range(descent_run, n - climb_run):
        if not in_terminal[i]:
            continue
        ok = True
        has_neg = False
        for j in range(i - descent_run, i):
            d = alt[j + 1] - alt[j]
            if strict:
                if d >= 0.0:
                    ok = False
                    break
            else:
                if d > 0.0:
                    ok = False
                    break
                if d < 0.0:
                    has_neg = True
        if not ok or (not strict and not has_neg):
            continue
        ok = True
        has_pos = False
        for j in range(i, i + climb_run):
            d = alt[j + 1] - alt[j]
            if strict:
                if d <= 0.0:
                    ok = False
                    break
            else:
                if d < 0.0:
                    ok = False
                    break
                if d > 0.0:
                    has_pos = True
        if ok and (strict or has_pos):
            out.append(i)
    return out
