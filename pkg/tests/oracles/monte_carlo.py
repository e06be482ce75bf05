"""Seeded Monte-Carlo area oracles, independent of the package.

Run ``python3 tests/oracles/monte_carlo.py`` to regenerate the constants
frozen in the tests. Only numpy is used.
"""

import numpy as np

SEED = 20261014
N = 1_000_000


def unit_disk_samples(rng, n=N):
    """Uniform points in the unit disk by rejection from the square."""
    out = np.empty((0, 2))
    while len(out) < n:
        p = rng.uniform(-1, 1, size=(2 * n, 2))
        out = np.concatenate([out, p[(p * p).sum(axis=1) <= 1]])
    return out[:n]


def ribbon_fractions(w, seed=SEED):
    """Disk fraction inside a width-w strip: disk centred on its edge, then on its centreline."""
    p = unit_disk_samples(np.random.default_rng(seed))
    y = p[:, 1]
    edge = np.mean((y >= 0) & (y <= w))
    centre = np.mean(np.abs(y) <= w / 2)
    return float(edge), float(centre)


def annulus_fraction(r, R, t, seed=SEED):
    """Unit-disk fraction around (t, 0) lying in the annulus r <= |y| <= R."""
    p = unit_disk_samples(np.random.default_rng(seed)) + np.array([t, 0.0])
    d = np.sqrt((p * p).sum(axis=1))
    return float(np.mean((d >= r) & (d <= R)))


if __name__ == "__main__":
    print("ribbon w=0.4:", ribbon_fractions(0.4))
    for t in (0.0, 0.15, 0.3, 0.45, 0.7):
        print(f"annulus r=0.2 R=0.5 t={t}:", annulus_fraction(0.2, 0.5, t))
