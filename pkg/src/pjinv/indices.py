"""Co-norm bounds over pseudo-Jacobian sets and the regularity index.

Certification rests on 1-Lipschitzness of the smallest singular value in
spectral norm: covering the vertex simplex with a barycentric mesh of size
``net`` bounds the co-norm over the whole hull from below by the mesh
minimum minus net * diam(vertices).
"""

from itertools import combinations

import numpy as np

from .linalg import as_vector, conorm, spectral_norm
from .pseudojac import build_set

__all__ = [
    "ConormBounds",
    "RegularityReport",
    "set_conorm_bounds",
    "regularity_index",
]

# beyond this many mesh points (or vertices) the bound degrades to sampled
MAX_CERT_VERTICES = 4
MAX_MESH_POINTS = 200_000
DEFAULT_NET = 1e-3


class ConormBounds:
    """Lower (certified) and upper (sampled) bounds on the hull co-norm."""

    def __init__(self, lower, upper, certified, net_resolution, witness=None):
        if lower > upper + 1e-12:
            raise ValueError("lower bound exceeds upper bound")
        self.lower = float(lower)
        self.upper = float(upper)
        self.certified = bool(certified)
        self.net_resolution = float(net_resolution)
        self.witness = witness

    def __repr__(self):
        tag = "certified" if self.certified else "sampled"
        return f"ConormBounds([{self.lower:.6g}, {self.upper:.6g}], {tag})"


class RegularityReport:
    """Regularity index value with its bound kind and attaining witness."""

    def __init__(self, alpha, regular, bound_kind, witness, radius_used):
        self.alpha = float(alpha)
        self.regular = bool(regular)
        self.bound_kind = bound_kind
        self.witness = witness
        self.radius_used = float(radius_used)

    def __repr__(self):
        return (f"RegularityReport(alpha={self.alpha:.6g}, "
                f"regular={self.regular}, {self.bound_kind})")


def _singleton_bounds(v, radius, net):
    value = max(conorm(v) - radius, 0.0)
    witness = v
    if radius > 0.0:
        # rank-one perturbation along the minimal singular pair attains the bound
        u_mat, sv, vt = np.linalg.svd(v)
        witness = v - radius * np.outer(u_mat[:, -1], vt[-1])
    return ConormBounds(value, value, True, net, witness=witness)


def _simplex_mesh(k, subdivisions):
    # barycentric grid with weights i/subdivisions summing to 1
    def rec(prefix, remaining, slots):
        if slots == 1:
            yield prefix + [remaining]
            return
        for i in range(remaining + 1):
            yield from rec(prefix + [i], remaining - i, slots - 1)

    for counts in rec([], subdivisions, k):
        yield np.asarray(counts, dtype=float) / subdivisions


def _mesh_size(k, subdivisions):
    size = 1
    for i in range(1, k):
        size = size * (subdivisions + i) // i
    return size


def set_conorm_bounds(jset, net=DEFAULT_NET):
    """Bounds on inf of the co-norm over co(vertices) + radius * ball.

    Singleton sets are exact: conorm(V) - radius, attained by a rank-one
    perturbation aligned with the minimal singular pair.  For 2..4 vertices
    the simplex is covered with a barycentric mesh of size <= net and the
    1-Lipschitz bound certifies min_over_net - net * diam - radius.  Larger
    vertex sets (or meshes that would exceed the practical point budget)
    get a sampled, non-certified bound.
    """
    if not (net > 0):
        raise ValueError("net must be > 0")
    vertices = jset.vertices
    k = len(vertices)
    if k == 1:
        return _singleton_bounds(vertices[0], jset.radius, net)

    diam = max(spectral_norm(a - b) for a, b in combinations(vertices, 2))
    if diam == 0.0:
        return _singleton_bounds(vertices[0], jset.radius, net)
    subdivisions = max(int(np.ceil(1.0 / net)), 1)
    certifiable = (k <= MAX_CERT_VERTICES
                   and _mesh_size(k, subdivisions) <= MAX_MESH_POINTS)
    stacked = np.stack(vertices)

    if certifiable:
        best = np.inf
        witness = None
        for lam in _simplex_mesh(k, subdivisions):
            c = conorm(np.tensordot(lam, stacked, axes=1))
            if c < best:
                best = c
                witness = np.tensordot(lam, stacked, axes=1)
        lower = max(best - net * diam - jset.radius, 0.0)
        upper = max(best - jset.radius, 0.0)
        return ConormBounds(lower, upper, True, net, witness=witness)

    rng = np.random.default_rng(0)
    best = np.inf
    witness = None
    for lam in np.vstack([np.eye(k), rng.dirichlet(np.ones(k), size=4096)]):
        c = conorm(np.tensordot(lam, stacked, axes=1))
        if c < best:
            best = c
            witness = np.tensordot(lam, stacked, axes=1)
    return ConormBounds(0.0, max(best - jset.radius, 0.0), False, net,
                        witness=witness)


def regularity_index(model, provider, x, radii=None, net=DEFAULT_NET,
                     samples_per_radius=24, rng=None, use_usc_shortcut=None):
    """Regularity index of the provider's pseudo-Jacobian mapping at x.

    Under upper semicontinuity the index equals the at-point hull co-norm
    infimum, so a single set construction suffices.  Otherwise points are
    sampled in shrinking balls B(x, r) for r in ``radii``; the index is the
    max over r of the per-radius infima of certified lower bounds.

    The ``regular`` verdict additionally requires the certified bound to
    clear the numerical-singularity margin 10 * net.
    """
    x = as_vector(x)
    rng = np.random.default_rng(rng)
    shortcut = model.usc if use_usc_shortcut is None else use_usc_shortcut

    if shortcut:
        bounds = set_conorm_bounds(build_set(model, x, provider, rng=rng), net=net)
        alpha = bounds.lower if bounds.certified else bounds.upper
        regular = bounds.certified and bounds.lower > 10.0 * net
        kind = "certified" if bounds.certified else "sampled"
        return RegularityReport(alpha, regular, kind, bounds.witness, 0.0)

    if radii is None:
        radii = [r * (1.0 + np.linalg.norm(x)) for r in (1.0, 0.1, 0.01)]
    if not radii:
        raise ValueError("radii must be nonempty")
    best_alpha = -np.inf
    best = None
    all_certified = True
    for r in radii:
        worst = np.inf
        worst_bounds = None
        points = [x] + [x + _ball_point(rng, x.size) * r
                        for _ in range(samples_per_radius)]
        for z in points:
            bounds = set_conorm_bounds(build_set(model, z, provider, rng=rng),
                                       net=net)
            all_certified = all_certified and bounds.certified
            val = bounds.lower if bounds.certified else bounds.upper
            if val < worst:
                worst = val
                worst_bounds = bounds
        if worst > best_alpha:
            best_alpha = worst
            best = (worst_bounds, r)
    bounds, r_used = best
    regular = all_certified and best_alpha > 10.0 * net
    kind = "certified" if all_certified else "sampled"
    return RegularityReport(max(best_alpha, 0.0), regular, kind,
                            bounds.witness, r_used)


def _ball_point(rng, n):
    d = rng.standard_normal(n)
    nrm = np.linalg.norm(d)
    if nrm == 0.0:
        d[0] = 1.0
        nrm = 1.0
    return d / nrm * rng.uniform() ** (1.0 / n)
