"""Independent reference computations shared by several test modules."""

import numpy as np


def gaussian_grid_search(P, Q, eps, center=(0.0, 1.0), half=2.0):
    """Minimize W2^2(P, R) + eps KL(R || Q) over R = N(m, s), coarse to 1e-4 resolution."""
    m0, s0 = center
    for step in (1e-2, 1e-3, 1e-4):
        if step == 1e-2:
            m = np.arange(m0 - half, m0 + half, step)
            s = np.arange(max(step, s0 - half), s0 + half, step)
        else:
            m = m0 + step * np.arange(-200, 201)
            s = s0 + step * np.arange(-200, 201)
        s = s[s > 0]
        M, S = np.meshgrid(m, s, indexing="ij")
        f = (P.mean - M) ** 2 + (P.std - S) ** 2 + eps * (
            np.log(Q.std / S) + (S**2 + (M - Q.mean) ** 2) / (2 * Q.std**2) - 0.5)
        k = np.unravel_index(np.argmin(f), f.shape)
        m0, s0 = M[k], S[k]
    return float(f[k]), float(m0), float(s0)
