"""Pure numpy versions of the compiled kernels in ``_core``.

Operation order matches the compiled loops exactly so results are identical.
"""

import numpy as np


def gather_correlate(padded, base, offsets, weights):
    out = np.zeros(len(base), dtype=np.float64)
    for off, w in zip(offsets.tolist(), weights.tolist()):
        out += w * padded[base + off]
    return out


def directed_hausdorff_sq(X, Y, chunk=2048):
    cmax = 0
    Yt = Y.T
    for start in range(0, len(X), chunk):
        xs = X[start:start + chunk]
        d2 = np.zeros((len(xs), len(Y)), dtype=np.int64)
        for c in range(X.shape[1]):
            t = xs[:, c:c + 1] - Yt[c][None, :]
            d2 += t * t
        cmax = max(cmax, int(d2.min(axis=1).max()))
    return cmax
