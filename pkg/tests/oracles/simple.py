"""Deliberately naive reference implementations, written without the package.

Configurations here are Python sets of integer tuples; kernels are dicts
from offset tuples to weights.
"""

from fractions import Fraction
from itertools import product


def conv_point(live, kernel, z):
    """alpha(z) = sum_w k_w a(z - w), summed in sorted offset order."""
    total = 0.0
    for w in sorted(kernel):
        if tuple(zi - wi for zi, wi in zip(z, w)) in live:
            total += kernel[w]
    return total


def box_kernel(n, dim=2, exact=False):
    size = (2 * n + 1) ** dim
    v = Fraction(1, size) if exact else 1.0 / size
    return {w: v for w in product(range(-n, n + 1), repeat=dim)}


def life_count_step(live):
    """Classic B3/S23 by neighbour counting, the textbook formulation."""
    counts = {}
    for (x, y) in live:
        for dx, dy in product((-1, 0, 1), repeat=2):
            if dx or dy:
                counts[(x + dx, y + dy)] = counts.get((x + dx, y + dy), 0) + 1
    return {c for c, n in counts.items() if n == 3 or (n == 2 and c in live)}


def interval_overlap(lo1, hi1, lo2, hi2):
    return max(Fraction(0), min(hi1, hi2) - max(lo1, lo2))


def box_cell_mass(z, eps, R):
    """Exact mass of the normalized box kernel of radius R in the cell at eps*z."""
    eps, R = Fraction(eps), Fraction(R)
    m = Fraction(1)
    for zi in z:
        m *= interval_overlap(eps * zi - eps / 2, eps * zi + eps / 2, -R, R) / (2 * R)
    return m
