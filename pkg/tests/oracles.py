"""Independent brute-force reference implementations used only by tests.

Everything here is deliberately naive (explicit loops, no spatial indexes)
so it cannot share a bug with the production code paths it checks.
"""

import numpy as np

FACE6 = [(-1, 0, 0), (1, 0, 0), (0, -1, 0), (0, 1, 0), (0, 0, -1), (0, 0, 1)]
VERTEX26 = [
    (dz, dy, dx)
    for dz in (-1, 0, 1)
    for dy in (-1, 0, 1)
    for dx in (-1, 0, 1)
    if (dz, dy, dx) != (0, 0, 0)
]


def brute_boundary(bits, offsets=FACE6):
    """Set voxels with an unset or out-of-extent neighbor, by explicit loop."""
    nz, ny, nx = bits.shape
    out = []
    for z in range(nz):
        for y in range(ny):
            for x in range(nx):
                if not bits[z, y, x]:
                    continue
                for dz, dy, dx in offsets:
                    uz, uy, ux = z + dz, y + dy, x + dx
                    if not (0 <= uz < nz and 0 <= uy < ny and 0 <= ux < nx):
                        out.append([z, y, x])
                        break
                    if not bits[uz, uy, ux]:
                        out.append([z, y, x])
                        break
    return out


def flood_fill_components(bits, offsets=FACE6):
    """Component count by repeated BFS flood fill."""
    nz, ny, nx = bits.shape
    seen = np.zeros_like(bits, dtype=bool)
    count = 0
    for z in range(nz):
        for y in range(ny):
            for x in range(nx):
                if not bits[z, y, x] or seen[z, y, x]:
                    continue
                count += 1
                stack = [(z, y, x)]
                seen[z, y, x] = True
                while stack:
                    cz, cy, cx = stack.pop()
                    for dz, dy, dx in offsets:
                        uz, uy, ux = cz + dz, cy + dy, cx + dx
                        if 0 <= uz < nz and 0 <= uy < ny and 0 <= ux < nx:
                            if bits[uz, uy, ux] and not seen[uz, uy, ux]:
                                seen[uz, uy, ux] = True
                                stack.append((uz, uy, ux))
    return count


def brute_dice_jaccard(bits_a, bits_b):
    """Overlap metrics by explicit voxel enumeration."""
    na = nb = inter = 0
    for va, vb in zip(bits_a.ravel(), bits_b.ravel()):
        if va:
            na += 1
        if vb:
            nb += 1
        if va and vb:
            inter += 1
    return 2.0 * inter / (na + nb), inter / (na + nb - inter)


def brute_asd(points_a, points_b):
    """Symmetric average surface distance from the full O(n*m) pairwise
    distance matrix (no spatial index)."""
    diff = np.asarray(points_a)[:, None, :] - np.asarray(points_b)[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    return 0.5 * (dist.min(axis=1).mean() + dist.min(axis=0).mean())


def t_two_sided_p_by_quadrature(t_value, dof, tol=1e-12):
    """Two-sided tail probability of Student's t by numeric integration of
    its density (independent of incomplete-beta evaluation)."""
    from scipy.integrate import quad
    from scipy.special import gammaln

    log_norm = gammaln((dof + 1) / 2.0) - gammaln(dof / 2.0) - 0.5 * np.log(dof * np.pi)

    def density(u):
        return np.exp(log_norm - ((dof + 1) / 2.0) * np.log1p(u * u / dof))

    tail, _ = quad(density, abs(t_value), np.inf, epsabs=tol, epsrel=tol)
    return 2.0 * tail
