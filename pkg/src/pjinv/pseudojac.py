"""Construction and calculus of pseudo-Jacobian sets.

A set is represented as co(vertices) + radius * closed-unit-ball in operator
spectral norm; every construction used here (singleton, Lipschitz ball, sum
rule, finite generalized-derivative sample) is exactly of this form, and the
support function of such a set is closed-form.
"""

import numpy as np

from .linalg import as_matrix, as_vector
from .maps import dini_derivatives, evaluate, local_lipschitz_estimate, numeric_jacobian

__all__ = [
    "PseudoJacobianSet",
    "ProviderSpec",
    "parse_provider",
    "build_set",
    "exact_singleton",
    "lipschitz_ball",
    "sum_rule",
    "sampled_clarke",
    "support_function",
    "pj_combine",
    "validity_check",
]

MAX_REDRAWS = 16


class PseudoJacobianSet:
    """co(vertices) + radius * unit ball of m x n operators, immutable."""

    __slots__ = ("vertices", "radius")

    def __init__(self, vertices, radius=0.0):
        vs = tuple(as_matrix(v) for v in vertices)
        if not vs:
            raise ValueError("vertex list must be nonempty")
        shape = vs[0].shape
        if any(v.shape != shape for v in vs):
            raise ValueError("all vertices must share one shape")
        if not (radius >= 0.0):
            raise ValueError("radius must be >= 0")
        for v in vs:
            v.setflags(write=False)
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "radius", float(radius))

    def __setattr__(self, *_):
        raise AttributeError("PseudoJacobianSet is immutable")

    @property
    def shape(self):
        return self.vertices[0].shape


class ProviderSpec:
    """Parsed provider selection: kind plus kind-specific parameters."""

    KINDS = ("exact", "ball", "sum", "clarke")

    def __init__(self, kind, delta=1e-4, m=32, eps=0.0, lip_radius=1e-2,
                 lip_samples=2000):
        if kind not in self.KINDS:
            raise ValueError(f"unknown provider kind {kind!r}")
        if not (delta > 0 and m >= 1 and eps >= 0):
            raise ValueError("require delta > 0, m >= 1, eps >= 0")
        self.kind = kind
        self.delta = float(delta)
        self.m = int(m)
        self.eps = float(eps)
        self.lip_radius = float(lip_radius)
        self.lip_samples = int(lip_samples)

    def __repr__(self):
        return f"ProviderSpec({self.kind!r})"


def parse_provider(text):
    """Parse "exact" | "ball:r=<f>,m=<i>" | "sum" | "clarke:delta=<f>,m=<i>,eps=<f>"."""
    head, _, rest = text.partition(":")
    kwargs = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            key = key.strip()
            if head == "ball" and key == "r":
                kwargs["lip_radius"] = float(val)
            elif head == "ball" and key == "m":
                kwargs["lip_samples"] = int(val)
            elif head == "clarke" and key in ("delta", "eps"):
                kwargs[key] = float(val)
            elif head == "clarke" and key == "m":
                kwargs["m"] = int(val)
            else:
                raise ValueError(f"bad provider parameter {item!r} for {head!r}")
    return ProviderSpec(head, **kwargs)


def exact_singleton(model, x):
    """Singleton set {f'(x)} at a differentiability point."""
    x = as_vector(x)
    if model.deriv is not None:
        jac = as_matrix(model.deriv(x))
    elif model.smooth_part is not None and model.lip_part is None:
        jac = as_matrix(model.smooth_part(x))
    else:
        jac = numeric_jacobian(model, x)
    return PseudoJacobianSet([jac], 0.0)


def lipschitz_ball(model, x, spec, rng=None):
    """Zero-centered operator ball of radius Lip f(x) (estimated)."""
    x = as_vector(x)
    lip = local_lipschitz_estimate(model, x, spec.lip_radius,
                                   samples=spec.lip_samples, rng=rng)
    zero = np.zeros((model.dim_out, model.dim_in))
    return PseudoJacobianSet([zero], lip)


def sum_rule(model, x, spec=None):
    """{g'(x)} + Lip h(x) * ball for a decomposition f = g + h."""
    x = as_vector(x)
    if model.smooth_part is None or model.lip_part is None:
        raise ValueError(f"{model.name}: sum provider needs smooth_part and lip_part")
    r = spec.lip_radius if spec is not None else 1e-2
    return PseudoJacobianSet([as_matrix(model.smooth_part(x))],
                             float(model.lip_part(x, r)))


def _batched_jacobians(model, zs, step):
    """Central-difference Jacobians at each row of zs via the batch oracle.

    Returns an (len(zs), dim_out, dim_in) array; arithmetic is identical to
    numeric_jacobian with the same step.
    """
    m, n = zs.shape
    stencil = np.eye(n) * step
    plus = (zs[:, None, :] + stencil[None, :, :]).reshape(m * n, n)
    minus = (zs[:, None, :] - stencil[None, :, :]).reshape(m * n, n)
    fp = np.asarray(model.fn_batch(plus), dtype=float)
    fm = np.asarray(model.fn_batch(minus), dtype=float)
    return (fp - fm).reshape(m, n, -1).transpose(0, 2, 1) / (2.0 * step)


def sampled_clarke(model, x, spec, rng=None):
    """Finite sample of Jacobians at nearby differentiability points.

    Vertices are central-difference Jacobians at spec.m points drawn
    uniformly in B(x, spec.delta); points where differentiation fails are
    re-drawn (at most MAX_REDRAWS times each).  The slack spec.eps inflates
    the set to account for the delta-ball closure.
    """
    x = as_vector(x)
    rng = np.random.default_rng(rng)
    step = spec.delta * 1e-4
    if model.fn_batch is not None \
            and np.max(np.abs(x)) + spec.delta < model.domain_halfwidth:
        d = rng.standard_normal((spec.m, x.size))
        nrm = np.linalg.norm(d, axis=1, keepdims=True)
        nrm[nrm == 0.0] = 1.0
        radii = spec.delta * rng.uniform(size=(spec.m, 1)) ** (1.0 / x.size)
        zs = x + d / nrm * radii
        jacs = _batched_jacobians(model, zs, step)
        vertices = []
        for j in range(spec.m):
            if np.all(np.isfinite(jacs[j])):
                vertices.append(jacs[j])
            else:
                vertices.append(_redraw_jacobian(model, x, spec, step, rng))
        return PseudoJacobianSet(vertices, spec.eps)
    vertices = [_redraw_jacobian(model, x, spec, step, rng)
                for _ in range(spec.m)]
    return PseudoJacobianSet(vertices, spec.eps)


def _redraw_jacobian(model, x, spec, step, rng):
    for attempt in range(MAX_REDRAWS + 1):
        d = rng.standard_normal(x.size)
        nrm = np.linalg.norm(d)
        if nrm == 0.0:
            continue
        z = x + d / nrm * spec.delta * rng.uniform() ** (1.0 / x.size)
        try:
            return numeric_jacobian(model, z, step=step)
        except FloatingPointError:
            if attempt == MAX_REDRAWS:
                raise
    raise FloatingPointError(f"{model.name}: no valid sample direction")


def build_set(model, x, spec, rng=None):
    """Dispatch a ProviderSpec to the matching constructor."""
    if spec.kind == "exact":
        return exact_singleton(model, x)
    if spec.kind == "ball":
        return lipschitz_ball(model, x, spec, rng=rng)
    if spec.kind == "sum":
        return sum_rule(model, x, spec)
    return sampled_clarke(model, x, spec, rng=rng)


def support_function(jset, ystar, v):
    """sup of <ystar, T v> over the set; exact for this representation."""
    ystar = as_vector(ystar)
    v = as_vector(v)
    best = max(float(ystar @ (V @ v)) for V in jset.vertices)
    return best + jset.radius * np.linalg.norm(ystar) * np.linalg.norm(v)


def pj_combine(alpha, j1, j2):
    """Set for alpha*f + g: all pairwise sums alpha*V1 + V2, radii combined."""
    if j1.shape != j2.shape:
        raise ValueError("operator shapes differ")
    vertices = [alpha * a + b for a in j1.vertices for b in j2.vertices]
    return PseudoJacobianSet(vertices, abs(alpha) * j1.radius + j2.radius)


def validity_check(model, x, jset, trials=1000, tol=1e-3, rng=None,
                   t0=1e-3, rho=0.5, k=20):
    """Empirical check of the defining support-function inequality.

    Over random unit pairs (ystar, v), estimates the upper Dini derivative
    of ystar o f at x along v and checks it against the support function,
    jointly with the equivalent lower-bound form.  Returns the fraction of
    passing trials.  The Dini limsup is approximated by a finite max, which
    can only under-estimate it, so the check is sound in the failure
    direction.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    x = as_vector(x)
    rng = np.random.default_rng(rng)
    passed = 0
    for _ in range(trials):
        ystar = _unit(rng, model.dim_out)
        v = _unit(rng, model.dim_in)
        phi = lambda z: float(ystar @ evaluate(model, z))
        upper, lower = dini_derivatives(phi, x, v, t0=t0, rho=rho, k=k)
        sup = support_function(jset, ystar, v)
        inf = -support_function(jset, -ystar, v)
        if upper <= sup + tol and lower >= inf - tol:
            passed += 1
    return passed / trials


def _unit(rng, n):
    d = rng.standard_normal(n)
    nrm = np.linalg.norm(d)
    while nrm == 0.0:
        d = rng.standard_normal(n)
        nrm = np.linalg.norm(d)
    return d / nrm
