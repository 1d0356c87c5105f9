"""Dense linear-operator machinery: singular values, co-norm, hull projection.

All norms are Euclidean.  Adjoints are plain transposes (self-duality), so
dual vectors are ordinary arrays.
"""

import numpy as np

__all__ = [
    "as_matrix",
    "as_vector",
    "singular_values",
    "spectral_norm",
    "conorm",
    "surjectivity_index",
    "HullSet",
    "project_to_hull",
    "dist_to_hull",
]


def as_matrix(a):
    """Coerce to a 2-d float array and validate finiteness."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def as_vector(x):
    """Coerce to a 1-d float array and validate finiteness."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1 or x.size < 1:
        raise ValueError(f"expected a nonempty 1-d array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector entries must be finite")
    return x


def singular_values(a, rel_tol=1e-13, max_sweeps=64):
    """Singular values of a dense matrix by one-sided Jacobi iteration.

    Columns of (a transposed copy of) the matrix are orthogonalized by plane
    rotations until every off-diagonal inner product is below ``rel_tol``
    relative to the column norms; the singular values are the final column
    norms.

    Parameters
    ----------
    a : array_like, shape (m, n)
    rel_tol : float
        Relative convergence tolerance on column orthogonality.
    max_sweeps : int
        Maximum number of full Jacobi sweeps.

    Returns
    -------
    ndarray, shape (min(m, n),)
        Singular values in nonincreasing order.
    """
    a = as_matrix(a)
    m, n = a.shape
    w = a.copy() if m >= n else a.T.copy()
    k = w.shape[1]
    if k == 1:
        return np.array([np.linalg.norm(w[:, 0])])
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(k - 1):
            for q in range(p + 1, k):
                app = w[:, p] @ w[:, p]
                aqq = w[:, q] @ w[:, q]
                apq = w[:, p] @ w[:, q]
                denom = np.sqrt(app * aqq)
                if denom == 0.0 or abs(apq) <= rel_tol * denom:
                    continue
                off = max(off, abs(apq) / denom)
                zeta = (aqq - app) / (2.0 * apq)
                t = np.sign(zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                if zeta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                wp = w[:, p].copy()
                w[:, p] = c * wp - s * w[:, q]
                w[:, q] = s * wp + c * w[:, q]
        if off <= rel_tol:
            break
    sv = np.sqrt(np.einsum("ij,ij->j", w, w))
    return np.sort(sv)[::-1]


def spectral_norm(a):
    """Largest singular value."""
    return float(singular_values(a)[0])


def conorm(a):
    """Co-norm of a linear map: inf of ||Ax|| over unit vectors x.

    Equals the smallest singular value when the map has a trivial kernel;
    zero whenever the domain dimension exceeds the codomain dimension.
    """
    a = as_matrix(a)
    m, n = a.shape
    if n > m:
        return 0.0
    return float(singular_values(a)[-1])


def surjectivity_index(a):
    """Co-norm of the adjoint; positive iff the map is surjective.

    For an invertible square matrix this equals 1 / ||A^-1||.
    """
    return conorm(as_matrix(a).T)


class HullSet:
    """Convex set co(vertices) + radius * closed-unit-ball, immutable.

    Parameters
    ----------
    vertices : array_like, shape (k, d)
        Nonempty list of points of equal dimension.
    radius : float
        Nonnegative ball inflation radius.
    """

    __slots__ = ("vertices", "radius")

    def __init__(self, vertices, radius=0.0):
        v = np.atleast_2d(np.asarray(vertices, dtype=float))
        if v.shape[0] < 1 or not np.all(np.isfinite(v)):
            raise ValueError("hull vertices must be a nonempty finite array")
        if not (radius >= 0.0):
            raise ValueError("hull radius must be >= 0")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "radius", float(radius))

    def __setattr__(self, *_):
        raise AttributeError("HullSet is immutable")

    @property
    def dim(self):
        return self.vertices.shape[1]


def project_to_hull(p, vertices, gap_tol=1e-10, max_iter=50000):
    """Euclidean projection of a point onto the convex hull of vertices.

    Uses Frank-Wolfe with away steps (linearly convergent on polytopes).
    The duality gap certifies a lower bound sqrt(max(0, dist^2 - 2*gap))
    on the true distance; iteration stops once the current distance is
    within ``gap_tol`` of that certified bound, so the returned distance
    is accurate to ``gap_tol`` even for nearly degenerate hulls (where a
    raw duality-gap threshold certifies far less).
    Vertex-selection ties are broken by lowest index.

    Returns
    -------
    (ndarray, float)
        The projection point and its distance to ``p``.
    """
    p = as_vector(p)
    v = np.atleast_2d(np.asarray(vertices, dtype=float))
    k = v.shape[0]
    if v.shape[1] != p.size:
        raise ValueError("point and hull vertices have different dimensions")
    lam = np.zeros(k)
    lam[0] = 1.0
    x = v[0].copy()
    for _ in range(max_iter):
        g = x - p
        scores = v @ g
        s = int(np.argmin(scores))  # argmin returns the lowest tied index
        gap = g @ x - scores[s]
        dist2 = g @ g
        lb2 = dist2 - 2.0 * gap
        certified_lb = np.sqrt(lb2) if lb2 > 0.0 else 0.0
        if np.sqrt(dist2) - certified_lb <= gap_tol:
            break
        active = np.flatnonzero(lam > 0)
        a = int(active[np.argmax(scores[active])])
        if g @ x - scores[s] >= scores[a] - g @ x:
            d = v[s] - x
            gamma_max = 1.0
            step_kind = "fw"
        else:
            d = x - v[a]
            if lam[a] >= 1.0:
                d = v[s] - x
                gamma_max = 1.0
                step_kind = "fw"
            else:
                gamma_max = lam[a] / (1.0 - lam[a])
                step_kind = "away"
        dd = d @ d
        if dd <= 0.0:
            break
        gamma = min(max(-(g @ d) / dd, 0.0), gamma_max)
        if gamma <= 0.0:
            break
        if step_kind == "fw":
            lam *= 1.0 - gamma
            lam[s] += gamma
        else:
            lam *= 1.0 + gamma
            lam[a] -= gamma
        x = lam @ v
    return x, float(np.linalg.norm(x - p))


def dist_to_hull(p, hull, gap_tol=1e-10):
    """Distance from a point to a HullSet, clamped at zero.

    Returns max(d - radius, 0) where d is the distance to the convex hull
    of the vertex list.
    """
    _, d = project_to_hull(p, hull.vertices, gap_tol=gap_tol)
    return max(d - hull.radius, 0.0)
