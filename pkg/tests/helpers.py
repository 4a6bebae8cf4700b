import numpy as np


def random_disc(rng, size, radius=1.0):
    """Uniform samples from the complex disc of the given radius."""
    r = radius * np.sqrt(rng.uniform(size=size))
    return r * np.exp(2j * np.pi * rng.uniform(size=size))


def same_set(a, b, tol):
    """Canonically ordered point arrays agree entrywise within ``tol``."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and (a.size == 0 or float(np.max(np.abs(a - b))) <= tol)


def covered(points, pool, tol):
    """Every row of ``points`` is within ``tol`` (max-norm) of some row of ``pool``."""
    pool = np.asarray(pool)
    return all(np.min(np.max(np.abs(pool - p), axis=1)) <= tol for p in points)
