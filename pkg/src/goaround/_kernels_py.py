"""Pure-Python fallback for the run-length scan kernel.

Mirrors goaround._kernels exactly; used when the compiled extension is
unavailable or when GOAROUND_KERNEL=py is set.
"""

BACKEND = "python"


def scan_candidates(alt, in_terminal, descent_run, climb_run, strict):
    """Indices i where a descent run ends and a climb run starts.

    A candidate index i satisfies, over the consecutive altitude steps
    d[j] = alt[j+1] - alt[j]:

      * the descent_run steps ending at sample i (j in [i-descent_run, i-1])
        are all negative (strict) or all non-positive with at least one
        negative (non-strict),
      * the climb_run steps starting at sample i (j in [i, i+climb_run-1])
        are all positive (strict) or all non-negative with at least one
        positive (non-strict),
      * in_terminal[i] is true.
    """
    n = len(alt)
    out = []
    if n < descent_run + climb_run + 1:
        return out
    a = alt.tolist() if hasattr(alt, "tolist") else list(alt)
    term = in_terminal.tolist() if hasattr(in_terminal, "tolist") else list(in_terminal)
    for i in range(descent_run, n - climb_run):
        if not term[i]:
            continue
        ok = True
        has_neg = False
        for j in range(i - descent_run, i):
            d = a[j + 1] - a[j]
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
            d = a[j + 1] - a[j]
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
