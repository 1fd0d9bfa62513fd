"""Analytic risk landscapes, data models, and their isolated minima.

Every built-in landscape ships closed-form value/gradient/Hessian maps,
analytic initial points for each well, and an exact loss bound M over its
experiment domain, so that every bound formula downstream can be evaluated
without estimation error.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np
from scipy.stats import qmc

from .errors import ArgumentError, DomainError, LandscapeDefinitionError

__all__ = [
    "RiskJet",
    "EllipsoidSpec",
    "MinimumDescriptor",
    "Landscape",
    "DataModel",
    "risk_jet",
    "empirical_risk_jet",
    "enumerate_minima",
    "lipschitz_estimate",
    "disjoint_radius",
    "quadratic_landscape",
    "double_well_landscape",
    "spline_double_well_landscape",
    "rls_data_model",
    "constant_loss_data_model",
    "make_landscape",
    "make_data_model",
    "BUILTIN_LANDSCAPES",
    "BUILTIN_DATA_MODELS",
]

GRADIENT_TOL = 1e-10
GLOBAL_VALUE_TOL = 1e-9
ZERO_EIG_REL_THRESHOLD = 1e-10


@dataclass(frozen=True)
class RiskJet:
    """Value, gradient, and Hessian of a risk function at one point."""

    value: float
    gradient: np.ndarray
    hessian: np.ndarray


@dataclass(frozen=True)
class EllipsoidSpec:
    """Region {w : ||w - center||_metric <= radius} for a PD metric."""

    center: np.ndarray
    metric: np.ndarray
    radius: float

    def metric_norm(self, w: np.ndarray) -> np.ndarray:
        diff = np.asarray(w, dtype=float) - self.center
        return np.sqrt(np.einsum("...i,ij,...j->...", diff, self.metric, diff))

    def contains(self, w: np.ndarray) -> np.ndarray:
        return self.metric_norm(w) <= self.radius


@dataclass(frozen=True)
class MinimumDescriptor:
    """One isolated minimizer of the regularized risk with exact curvature.

    ``hessian`` is the Hessian of the plain risk at the minimizer, and
    ``reg_hessian`` the regularized one (hessian + 2λI). ``lambda_min`` is
    the smallest eigenvalue of ``hessian`` above the zero threshold
    (1e-10 times its largest eigenvalue). ``lipschitz`` maps a radius r to
    the local Hessian-Lipschitz constant L(r) on the curvature ellipsoid;
    ``lipschitz_is_estimate`` flags the sampled (possibly under-estimating)
    fallback instead of a closed form.
    """

    index: int
    location: np.ndarray
    reg_risk_value: float
    hessian: np.ndarray
    reg_hessian: np.ndarray
    lambda_min: float
    is_global: bool
    lipschitz: Callable[[float], float]
    lipschitz_is_estimate: bool
    ridge: float
    domain_box: np.ndarray | None = None

    def ellipsoid(self, r: float) -> EllipsoidSpec:
        return EllipsoidSpec(center=self.location, metric=self.reg_hessian, radius=float(r))

    @property
    def dimension(self) -> int:
        return int(self.location.shape[0])


@dataclass(frozen=True)
class Landscape:
    """Analytic population risk over a compact experiment domain.

    ``risk``/``gradient``/``hessian`` accept points of shape (..., d) and
    vectorize over leading axes. ``initial_points`` are the analytic well
    seeds handed to Newton polishing; ``loss_bound`` is the exact supremum
    M of the risk (and of any attached loss) over the domain box.
    """

    name: str
    dimension: int
    domain_box: np.ndarray
    loss_bound: float
    risk: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    initial_points: tuple[np.ndarray, ...]
    lipschitz_closed_form: (
        Callable[[np.ndarray, np.ndarray, float, float], float] | None
    ) = None
    params: dict[str, Any] = field(default_factory=dict)

    def contains(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        lo = self.domain_box[:, 0]
        hi = self.domain_box[:, 1]
        return np.all((w >= lo) & (w <= hi), axis=-1)

    def reg_risk(self, w: np.ndarray, lam: float) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return self.risk(w) + lam * np.sum(w * w, axis=-1)

    def reg_gradient(self, w: np.ndarray, lam: float) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return self.gradient(w) + 2.0 * lam * w

    def reg_hessian(self, w: np.ndarray, lam: float) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        eye = np.eye(self.dimension)
        return self.hessian(w) + 2.0 * lam * eye


@dataclass(frozen=True)
class DataModel:
    """Loss and seeded example sampler realizing a landscape's risk.

    The expectation of ``loss(w, z)`` over examples equals the landscape
    risk at w; the loss is twice differentiable in w on the domain box.
    ``sample_examples(rng, n)`` returns n examples as an array whose first
    axis indexes the sample.
    """

    name: str
    landscape: Landscape
    sample_size: int
    loss: Callable[[np.ndarray, Any], float]
    loss_gradient: Callable[[np.ndarray, Any], np.ndarray]
    loss_hessian: Callable[[np.ndarray, Any], np.ndarray]
    sample_examples: Callable[[np.random.Generator, int], np.ndarray]
    batched_empirical_value: (
        Callable[[np.ndarray], Callable[[np.ndarray], np.ndarray]] | None
    ) = None


def _as_point(w, dimension: int) -> np.ndarray:
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if w.shape != (dimension,):
        raise ArgumentError(f"expected a point of shape ({dimension},), got {w.shape}")
    return w


def risk_jet(landscape: Landscape, w) -> RiskJet:
    """Evaluate (R(w), ∇R(w), ∇²R(w)) from the closed forms.

    Raises DomainError for points outside the experiment domain.
    """
    w = _as_point(w, landscape.dimension)
    if not bool(landscape.contains(w)):
        raise DomainError(
            f"point {w} lies outside the domain box of landscape '{landscape.name}'"
        )
    hess = np.asarray(landscape.hessian(w), dtype=float)
    hess = 0.5 * (hess + hess.T)
    return RiskJet(
        value=float(landscape.risk(w)),
        gradient=np.asarray(landscape.gradient(w), dtype=float),
        hessian=hess,
    )


def empirical_risk_jet(data_model: DataModel, sample, w, lam: float) -> RiskJet:
    """Jet of the ridge-regularized empirical risk (1/m)Σℓ(w, zᵢ) + λ‖w‖²."""
    sample = np.asarray(sample)
    if sample.shape[0] == 0:
        raise ArgumentError("empirical risk needs a nonempty sample")
    land = data_model.landscape
    w = _as_point(w, land.dimension)
    if not bool(land.contains(w)):
        raise DomainError(f"point {w} lies outside the domain box")
    m = sample.shape[0]
    value = 0.0
    grad = np.zeros(land.dimension)
    hess = np.zeros((land.dimension, land.dimension))
    for z in sample:
        value += float(data_model.loss(w, z))
        grad += np.asarray(data_model.loss_gradient(w, z), dtype=float)
        hess += np.asarray(data_model.loss_hessian(w, z), dtype=float)
    value = value / m + lam * float(w @ w)
    grad = grad / m + 2.0 * lam * w
    hess = hess / m + 2.0 * lam * np.eye(land.dimension)
    return RiskJet(value=value, gradient=grad, hessian=0.5 * (hess + hess.T))


def _newton_polish(landscape: Landscape, seed: np.ndarray, lam: float) -> np.ndarray:
    w = np.array(seed, dtype=float)
    width = landscape.domain_box[:, 1] - landscape.domain_box[:, 0]
    lo = landscape.domain_box[:, 0] - 10.0 * width
    hi = landscape.domain_box[:, 1] + 10.0 * width
    for _ in range(100):
        g = landscape.reg_gradient(w, lam)
        if float(np.linalg.norm(g)) <= GRADIENT_TOL:
            return w
        h = landscape.reg_hessian(w, lam)
        try:
            step = np.linalg.solve(h, g)
        except np.linalg.LinAlgError as exc:
            raise LandscapeDefinitionError(
                f"singular regularized Hessian while polishing seed {seed}"
            ) from exc
        w = w - step
        if np.any(w < lo) or np.any(w > hi):
            raise LandscapeDefinitionError(
                f"Newton polishing diverged from seed {seed} (lambda={lam})"
            )
    raise LandscapeDefinitionError(
        f"Newton polishing did not reach gradient tolerance from seed {seed}"
    )


def _nonzero_min_eigenvalue(hessian: np.ndarray) -> float:
    eigs = np.linalg.eigvalsh(hessian)
    largest = float(eigs[-1])
    if largest <= 0.0:
        return 0.0
    threshold = ZERO_EIG_REL_THRESHOLD * largest
    above = eigs[eigs > threshold]
    return float(above[0]) if above.size else 0.0


def enumerate_minima(landscape: Landscape, lam: float) -> list[MinimumDescriptor]:
    """Newton-polish the landscape's well seeds into minimum descriptors.

    Descriptors come back sorted by regularized risk value (then by seed
    order); ``is_global`` marks those within 1e-9 of the best value.
    Raises LandscapeDefinitionError when a polished point violates the
    isolated-minima assumption (indefinite regularized Hessian, risk
    Hessian with negative curvature, or Newton divergence).
    """
    if lam < 0.0:
        raise ArgumentError(f"ridge weight must be nonnegative, got {lam}")
    polished: list[np.ndarray] = []
    for seed in landscape.initial_points:
        w = _newton_polish(landscape, np.asarray(seed, dtype=float), lam)
        if any(np.linalg.norm(w - prev) <= 1e-8 for prev in polished):
            continue  # wells merged under this ridge weight
        polished.append(w)

    records = []
    for order, w in enumerate(polished):
        hess = np.asarray(landscape.hessian(w), dtype=float)
        hess = 0.5 * (hess + hess.T)
        reg_hess = hess + 2.0 * lam * np.eye(landscape.dimension)
        reg_eigs = np.linalg.eigvalsh(reg_hess)
        if reg_eigs[0] <= 0.0:
            raise LandscapeDefinitionError(
                f"regularized Hessian not positive definite at {w}: "
                "isolated-minima assumption violated"
            )
        eigs = np.linalg.eigvalsh(hess)
        if eigs[0] < -1e-9 * max(1.0, float(eigs[-1])):
            raise LandscapeDefinitionError(
                f"risk Hessian has negative curvature at {w}"
            )
        records.append((float(landscape.reg_risk(w, lam)), order, w, hess, reg_hess))

    records.sort(key=lambda rec: (rec[0], rec[1]))
    best = records[0][0]
    minima: list[MinimumDescriptor] = []
    for index, (value, _, w, hess, reg_hess) in enumerate(records):
        desc = MinimumDescriptor(
            index=index,
            location=w,
            reg_risk_value=value,
            hessian=hess,
            reg_hessian=reg_hess,
            lambda_min=_nonzero_min_eigenvalue(hess),
            is_global=bool(value - best <= GLOBAL_VALUE_TOL),
            lipschitz=lambda r: 0.0,  # placeholder, replaced below
            lipschitz_is_estimate=landscape.lipschitz_closed_form is None,
            ridge=lam,
            domain_box=np.array(landscape.domain_box),
        )
        profile = _make_lipschitz_profile(landscape, desc, lam)
        minima.append(replace(desc, lipschitz=profile))
    return minima


def _make_lipschitz_profile(
    landscape: Landscape, minimum: MinimumDescriptor, lam: float
) -> Callable[[float], float]:
    def profile(r: float) -> float:
        return lipschitz_estimate(landscape, minimum, r)

    return profile


def _halton_ellipsoid_points(minimum: MinimumDescriptor, r: float, count: int) -> np.ndarray:
    d = minimum.dimension
    eigval, eigvec = np.linalg.eigh(minimum.reg_hessian)
    inv_sqrt = eigvec @ np.diag(eigval**-0.5) @ eigvec.T
    sampler = qmc.Halton(d=d, scramble=False)
    collected = []
    total = 0
    while total < count:
        u = sampler.random(4 * count)
        v = 2.0 * u - 1.0
        keep = np.sum(v * v, axis=1) <= 1.0
        pts = v[keep]
        collected.append(pts)
        total += pts.shape[0]
    ball = np.concatenate(collected, axis=0)[: max(count, 1)]
    return minimum.location + (r * ball) @ inv_sqrt.T


def lipschitz_estimate(
    landscape: Landscape, minimum: MinimumDescriptor, r: float, points: int = 4096
) -> float:
    """Local Hessian-Lipschitz constant L(r) over the curvature ellipsoid.

    Returns the landscape's closed form when available. Otherwise the
    maximum of ||∇²R(w*) − ∇²R(w)||₂ / ||w* − w|| over a deterministic
    low-discrepancy point set of at least ``points`` ellipsoid points; in
    that case the value is an under-estimate of the true supremum (the
    descriptor's ``lipschitz_is_estimate`` flag records this).

    By convention L(0) = 0: the ratio is only taken at w != w*.
    """
    if r < 0.0:
        raise ArgumentError(f"radius must be nonnegative, got r={r}")
    if r == 0.0:
        return 0.0
    if landscape.lipschitz_closed_form is not None:
        return float(
            landscape.lipschitz_closed_form(
                minimum.location, minimum.reg_hessian, r, minimum.ridge
            )
        )
    pts = _halton_ellipsoid_points(minimum, r, points)
    diffs = pts - minimum.location
    dists = np.linalg.norm(diffs, axis=1)
    keep = dists > 1e-12
    pts, dists = pts[keep], dists[keep]
    h_star = minimum.hessian
    h_all = landscape.hessian(pts)
    gaps = np.linalg.eigvalsh(h_all - h_star)
    spectral = np.maximum(np.abs(gaps[..., 0]), np.abs(gaps[..., -1]))
    return float(np.max(spectral / dists))


def disjoint_radius(minima: list[MinimumDescriptor]) -> float:
    """Conservative radius r0 below which all curvature ellipsoids are disjoint.

    For two or more minima: r0 = 0.5 · min pairwise distance · sqrt of the
    smallest eigenvalue of any regularized Hessian. A single minimum gets
    the radius at which its ellipsoid touches the domain box boundary.
    """
    if not minima:
        raise ArgumentError("need at least one minimum")
    if len(minima) == 1:
        m = minima[0]
        if m.domain_box is None:
            raise ArgumentError(
                "single-minimum disjoint radius needs the descriptor's domain box"
            )
        inv = np.linalg.inv(m.reg_hessian)
        axis_extent = np.sqrt(np.diagonal(inv))
        slack = np.minimum(
            m.location - m.domain_box[:, 0], m.domain_box[:, 1] - m.location
        )
        return float(np.min(slack / axis_extent))
    min_dist = math.inf
    for i in range(len(minima)):
        for j in range(i + 1, len(minima)):
            dist = float(np.linalg.norm(minima[i].location - minima[j].location))
            if dist <= 1e-12:
                raise ArgumentError(
                    f"minima {i} and {j} share a location; descriptors must be distinct"
                )
            min_dist = min(min_dist, dist)
    min_eig = min(float(np.linalg.eigvalsh(m.reg_hessian)[0]) for m in minima)
    return 0.5 * min_dist * math.sqrt(min_eig)


# ---------------------------------------------------------------------------
# Built-in landscapes


def _box(bounds, dimension: int) -> np.ndarray:
    box = np.asarray(bounds, dtype=float)
    if box.ndim == 1:
        box = np.tile(box, (dimension, 1))
    if box.shape != (dimension, 2) or np.any(box[:, 0] >= box[:, 1]):
        raise ArgumentError(f"bad domain box {bounds}")
    return box


def quadratic_landscape(
    dimension: int = 1, matrix=None, bounds=(-5.0, 5.0)
) -> Landscape:
    """Risk ½wᵀAw with constant Hessian A (symmetric PSD), minimum at 0."""
    if matrix is None:
        matrix = np.eye(dimension)
    a = np.asarray(matrix, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    dimension = a.shape[0]
    a = 0.5 * (a + a.T)
    if np.linalg.eigvalsh(a)[0] < -1e-12 * max(1.0, abs(np.linalg.eigvalsh(a)[-1])):
        raise ArgumentError("quadratic matrix must be positive semi-definite")
    box = _box(bounds, dimension)
    corners = np.array(list(itertools.product(*box)))
    loss_bound = float(max(0.5 * c @ a @ c for c in corners))

    def risk(w):
        w = np.asarray(w, dtype=float)
        return 0.5 * np.einsum("...i,ij,...j->...", w, a, w)

    def gradient(w):
        return np.asarray(w, dtype=float) @ a.T

    def hessian(w):
        w = np.asarray(w, dtype=float)
        return np.broadcast_to(a, w.shape[:-1] + a.shape).copy()

    return Landscape(
        name="quadratic",
        dimension=dimension,
        domain_box=box,
        loss_bound=loss_bound,
        risk=risk,
        gradient=gradient,
        hessian=hessian,
        initial_points=(np.zeros(dimension),),
        lipschitz_closed_form=lambda loc, hreg, r, lam: 0.0,
        params={"matrix": a, "bounds": [list(b) for b in box]},
    )


def double_well_landscape(dimension: int = 1, bounds=(-2.0, 2.0)) -> Landscape:
    """Coordinate-wise symmetric double well Σₖ(wₖ² − 1)² with 2^d wells.

    Valid for ridge weights λ < 2; beyond that the wells merge and the
    risk Hessian at the merged point is negative.
    """
    box = _box(bounds, dimension)
    per_coord = []
    for lo, hi in box:
        candidates = [(lo * lo - 1.0) ** 2, (hi * hi - 1.0) ** 2]
        if lo <= 0.0 <= hi:
            candidates.append(1.0)
        per_coord.append(max(candidates))
    loss_bound = float(sum(per_coord))

    def risk(w):
        w = np.asarray(w, dtype=float)
        return np.sum((w * w - 1.0) ** 2, axis=-1)

    def gradient(w):
        w = np.asarray(w, dtype=float)
        return 4.0 * w * (w * w - 1.0)

    def hessian(w):
        w = np.asarray(w, dtype=float)
        diag = 12.0 * w * w - 4.0
        return diag[..., :, None] * np.eye(dimension)

    def lipschitz_closed_form(location, reg_hessian, r, lam):
        # |R''kk(w) − R''kk(w*)| = 12|wk − w*k||wk + w*k|; the ratio peaks on
        # a single-coordinate deviation of the full Euclidean ellipsoid radius.
        s = float(np.max(np.abs(location)))
        rho = r / math.sqrt(float(np.linalg.eigvalsh(reg_hessian)[0]))
        return 12.0 * (2.0 * s + rho)

    seeds = tuple(
        np.array(signs, dtype=float)
        for signs in itertools.product((-1.0, 1.0), repeat=dimension)
    )
    return Landscape(
        name="double_well",
        dimension=dimension,
        domain_box=box,
        loss_bound=loss_bound,
        risk=risk,
        gradient=gradient,
        hessian=hessian,
        initial_points=seeds,
        lipschitz_closed_form=lipschitz_closed_form,
        params={"bounds": [list(b) for b in box]},
    )


def _quintic_bridge(j1, j2, v1, g1, h1, v2, g2, h2):
    # Degree-5 polynomial in t = (w - j1)/(j2 - j1) matching value, slope and
    # curvature of both quadratic pieces at the junctions.
    span = j2 - j1
    a0, a1, a2 = v1, span * g1, 0.5 * span * span * h1
    rhs = np.array(
        [
            v2 - (a0 + a1 + a2),
            span * g2 - (a1 + 2.0 * a2),
            span * span * h2 - 2.0 * a2,
        ]
    )
    mat = np.array([[1.0, 1.0, 1.0], [3.0, 4.0, 5.0], [6.0, 12.0, 20.0]])
    a3, a4, a5 = np.linalg.solve(mat, rhs)
    return np.array([a0, a1, a2, a3, a4, a5]), span


def spline_double_well_landscape(
    centers=(-1.0, 1.0),
    curvatures=(1.0, 4.0),
    junction_offset: float = 0.4,
    bounds=(-3.0, 3.0),
) -> Landscape:
    """Two 1-d quadratic wells of equal depth and unequal curvature.

    The wells ½hᵢ(w − cᵢ)² are joined by a quintic bridge matching value,
    slope and curvature at both junctions, so the risk is exactly C² and
    the well Hessians are exactly h₁ ≠ h₂.
    """
    c1, c2 = float(centers[0]), float(centers[1])
    h1, h2 = float(curvatures[0]), float(curvatures[1])
    delta = float(junction_offset)
    if not (c1 < c2 and h1 > 0 and h2 > 0 and 0 < delta < 0.5 * (c2 - c1)):
        raise ArgumentError("bad spline double-well parameters")
    j1, j2 = c1 + delta, c2 - delta
    coeffs, span = _quintic_bridge(
        j1, j2, 0.5 * h1 * delta * delta, h1 * delta, h1,
        0.5 * h2 * delta * delta, -h2 * delta, h2,
    )
    poly = np.polynomial.Polynomial(coeffs)
    dpoly = poly.deriv()
    ddpoly = dpoly.deriv()

    # The bridge must form a single barrier: exactly one stationary point
    # strictly inside, and no dip below the well depths.
    slope_roots = dpoly.roots()
    interior = [
        float(z.real)
        for z in slope_roots
        if abs(z.imag) < 1e-10 and 1e-9 < z.real < 1.0 - 1e-9
    ]
    if len(interior) != 1:
        raise LandscapeDefinitionError(
            "spline bridge has spurious stationary points; adjust parameters"
        )
    if float(poly(np.linspace(0.0, 1.0, 1001)).min()) < 0.0:
        raise LandscapeDefinitionError("spline bridge dips below zero")

    box = _box(bounds, 1)
    lo, hi = box[0]
    if not (lo < c1 and hi > c2):
        raise ArgumentError("domain box must contain both wells")
    barrier = float(poly(interior[0]))
    loss_bound = float(
        max(0.5 * h1 * (lo - c1) ** 2, 0.5 * h2 * (hi - c2) ** 2, barrier)
    )

    def _pieces(w):
        w = np.asarray(w, dtype=float)
        x = w[..., 0]
        t = (x - j1) / span
        left = x <= j1
        right = x >= j2
        mid = ~(left | right)
        return x, t, left, mid, right

    def risk(w):
        x, t, left, mid, right = _pieces(w)
        out = np.empty_like(x)
        out[left] = 0.5 * h1 * (x[left] - c1) ** 2
        out[right] = 0.5 * h2 * (x[right] - c2) ** 2
        out[mid] = poly(t[mid])
        return out

    def gradient(w):
        x, t, left, mid, right = _pieces(w)
        out = np.empty_like(x)
        out[left] = h1 * (x[left] - c1)
        out[right] = h2 * (x[right] - c2)
        out[mid] = dpoly(t[mid]) / span
        return out[..., None]

    def hessian(w):
        x, t, left, mid, right = _pieces(w)
        out = np.empty_like(x)
        out[left] = h1
        out[right] = h2
        out[mid] = ddpoly(t[mid]) / (span * span)
        return out[..., None, None]

    return Landscape(
        name="spline_double_well",
        dimension=1,
        domain_box=box,
        loss_bound=loss_bound,
        risk=risk,
        gradient=gradient,
        hessian=hessian,
        initial_points=(np.array([c1]), np.array([c2])),
        lipschitz_closed_form=None,
        params={
            "centers": [c1, c2],
            "curvatures": [h1, h2],
            "junction_offset": delta,
            "bounds": [list(b) for b in box],
        },
    )


def rls_data_model(
    slope: float = 0.5,
    noise_halfwidth: float = 0.5,
    sample_size: int = 100,
    bounds=(-3.0, 3.0),
) -> DataModel:
    """Regularized-least-squares data model y = slope·x + ν on [-1, 1].

    x ~ U[-1, 1] and ν ~ U[-noise_halfwidth, noise_halfwidth] with
    slope + noise_halfwidth ≤ 1, so the clipping of y to [-1, 1] never
    binds and the risk has the exact closed form
    ((w − slope)² + noise_halfwidth²) / 3 with constant Hessian 2/3.
    """
    if abs(slope) + noise_halfwidth > 1.0:
        raise ArgumentError("need |slope| + noise_halfwidth <= 1 so clipping is inert")
    box = _box(bounds, 1)
    w_max = float(np.max(np.abs(box)))
    loss_bound = (1.0 + w_max) ** 2
    var_x = 1.0 / 3.0
    var_noise = noise_halfwidth**2 / 3.0

    def risk(w):
        w = np.asarray(w, dtype=float)
        return var_x * (w[..., 0] - slope) ** 2 + var_noise

    def gradient(w):
        w = np.asarray(w, dtype=float)
        return 2.0 * var_x * (w - slope)

    def hessian(w):
        w = np.asarray(w, dtype=float)
        base = np.array([[2.0 * var_x]])
        return np.broadcast_to(base, w.shape[:-1] + (1, 1)).copy()

    landscape = Landscape(
        name="rls",
        dimension=1,
        domain_box=box,
        loss_bound=loss_bound,
        risk=risk,
        gradient=gradient,
        hessian=hessian,
        initial_points=(np.array([slope]),),
        lipschitz_closed_form=lambda loc, hreg, r, lam: 0.0,
        params={
            "slope": slope,
            "noise_halfwidth": noise_halfwidth,
            "bounds": [list(b) for b in box],
        },
    )

    def loss(w, z):
        x, y = z
        return float((y - w[0] * x) ** 2)

    def loss_gradient(w, z):
        x, y = z
        return np.array([-2.0 * (y - w[0] * x) * x])

    def loss_hessian(w, z):
        x, _ = z
        return np.array([[2.0 * x * x]])

    def sample_examples(rng: np.random.Generator, n: int) -> np.ndarray:
        x = rng.uniform(-1.0, 1.0, size=n)
        nu = rng.uniform(-noise_halfwidth, noise_halfwidth, size=n)
        y = np.clip(slope * x + nu, -1.0, 1.0)
        return np.column_stack([x, y])

    def batched_empirical_value(sample: np.ndarray):
        x = sample[:, 0]
        y = sample[:, 1]

        def value(wbatch: np.ndarray) -> np.ndarray:
            wb = np.asarray(wbatch, dtype=float)[..., 0]
            resid = y - wb[..., None] * x
            return np.mean(resid * resid, axis=-1)

        return value

    return DataModel(
        name="rls",
        landscape=landscape,
        sample_size=sample_size,
        loss=loss,
        loss_gradient=loss_gradient,
        loss_hessian=loss_hessian,
        sample_examples=sample_examples,
        batched_empirical_value=batched_empirical_value,
    )


def constant_loss_data_model(landscape: Landscape, sample_size: int = 100) -> DataModel:
    """Degenerate data model whose loss ignores the example: ℓ(w, z) = R(w)."""

    def loss(w, z):
        return float(landscape.risk(np.asarray(w, dtype=float)))

    def loss_gradient(w, z):
        return np.asarray(landscape.gradient(np.asarray(w, dtype=float)), dtype=float)

    def loss_hessian(w, z):
        return np.asarray(landscape.hessian(np.asarray(w, dtype=float)), dtype=float)

    def sample_examples(rng: np.random.Generator, n: int) -> np.ndarray:
        return np.zeros((n, 1))

    def batched_empirical_value(sample: np.ndarray):
        def value(wbatch: np.ndarray) -> np.ndarray:
            return landscape.risk(np.asarray(wbatch, dtype=float))

        return value

    return DataModel(
        name=f"constant_loss[{landscape.name}]",
        landscape=landscape,
        sample_size=sample_size,
        loss=loss,
        loss_gradient=loss_gradient,
        loss_hessian=loss_hessian,
        sample_examples=sample_examples,
        batched_empirical_value=batched_empirical_value,
    )


BUILTIN_LANDSCAPES: dict[str, Callable[..., Landscape]] = {
    "quadratic": quadratic_landscape,
    "double_well": double_well_landscape,
    "spline_double_well": spline_double_well_landscape,
    "rls": lambda **kw: rls_data_model(**kw).landscape,
}

BUILTIN_DATA_MODELS: dict[str, Callable[..., DataModel]] = {
    "rls": rls_data_model,
}


def make_landscape(name: str, **params) -> Landscape:
    if name not in BUILTIN_LANDSCAPES:
        raise ArgumentError(
            f"unknown landscape '{name}'; available: {sorted(BUILTIN_LANDSCAPES)}"
        )
    return BUILTIN_LANDSCAPES[name](**params)


def make_data_model(name: str, **params) -> DataModel:
    if name not in BUILTIN_DATA_MODELS:
        raise ArgumentError(
            f"no data model named '{name}'; available: {sorted(BUILTIN_DATA_MODELS)}"
        )
    return BUILTIN_DATA_MODELS[name](**params)
