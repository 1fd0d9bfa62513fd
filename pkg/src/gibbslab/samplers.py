"""Samplers for the empirical Gibbs density e^(−γ·f(w)) / Z.

Three kinds: ``sgld`` (Langevin updates, approximate), ``metropolis``
(exact for the box-truncated target) and ``exact_gaussian`` (i.i.d. draws,
valid only for quadratic potentials). All chains are bitwise reproducible
from (master_seed, chain_id) via a documented 64-bit seed mix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import (
    ArgumentError,
    ConditioningError,
    DivergenceError,
    SamplerKindError,
)
from .landscapes import DataModel, EllipsoidSpec, Landscape

__all__ = [
    "GibbsTarget",
    "ChainBatch",
    "chain_seed",
    "sample_chain",
    "condition_on_region",
    "default_step_size",
    "target_from_landscape",
    "target_from_sample",
    "CHAIN_KINDS",
]

CHAIN_KINDS = ("sgld", "metropolis", "exact_gaussian")

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def chain_seed(master_seed: int, chain_id: int) -> int:
    """Per-chain 64-bit seed: splitmix64(splitmix64(master) XOR (chain_id+1)).

    The mix is stated here so any chain can be reproduced in isolation.
    """
    return _splitmix64(_splitmix64(int(master_seed) & _MASK64) ^ ((int(chain_id) + 1) & _MASK64))


@dataclass(frozen=True)
class GibbsTarget:
    """Potential f whose Gibbs density is ∝ e^(−γ f(w)) on the domain box.

    ``value`` accepts (..., d) batches; ``grad`` accepts a single point.
    ``quadratic`` carries (minimizer, Hessian of f) when f is exactly
    quadratic, which enables the exact_gaussian kind. For empirical
    targets ``data_value`` is the ridge-free part of f (the plain
    empirical risk), kept separate so generalization gaps need no
    cancellation-prone subtraction.
    """

    dim: int
    domain_box: np.ndarray
    value: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    quadratic: tuple[np.ndarray, np.ndarray] | None = None
    data_value: Callable[[np.ndarray], np.ndarray] | None = None


@dataclass(frozen=True)
class ChainBatch:
    """Samples from one sampler run with full reproducibility metadata."""

    samples: np.ndarray
    kind: str
    master_seed: int
    chain_id: int
    step_size: float
    burn_in: int
    steps: int
    acceptance_rate: float | None = None
    region: EllipsoidSpec | None = None
    region_complement: bool = False
    retained_fraction: float | None = None

    def __len__(self) -> int:
        return int(self.samples.shape[0])


def target_from_landscape(landscape: Landscape, ridge: float) -> GibbsTarget:
    """Population target f = R + λ‖w‖² (useful for sampler-vs-quadrature checks)."""
    quadratic = None
    probes = [np.asarray(p, dtype=float) for p in landscape.initial_points]
    if len(probes) == 1:
        # single well with a constant Hessian: the target is exactly quadratic
        h = np.atleast_2d(np.asarray(landscape.hessian(probes[0]), dtype=float))
        if np.allclose(landscape.hessian(probes[0] + 0.37), h, atol=1e-12):
            h_reg = h + 2.0 * ridge * np.eye(landscape.dimension)
            grad0 = landscape.reg_gradient(probes[0], ridge)
            w_min = probes[0] - np.linalg.solve(h_reg, grad0)
            quadratic = (w_min, h_reg)
    return GibbsTarget(
        dim=landscape.dimension,
        domain_box=np.array(landscape.domain_box),
        value=lambda w: landscape.reg_risk(w, ridge),
        grad=lambda w: landscape.reg_gradient(np.asarray(w, dtype=float), ridge),
        quadratic=quadratic,
    )


def target_from_sample(data_model: DataModel, sample: np.ndarray, ridge: float) -> GibbsTarget:
    """Empirical target f = (1/m)Σℓ(w, zᵢ) + λ‖w‖² for one drawn sample."""
    sample = np.asarray(sample)
    if sample.shape[0] == 0:
        raise ArgumentError("empirical target needs a nonempty sample")
    land = data_model.landscape
    d = land.dimension

    if data_model.batched_empirical_value is not None:
        data_value = data_model.batched_empirical_value(sample)
    else:
        def data_value(wbatch):
            wb = np.asarray(wbatch, dtype=float)
            flat = wb.reshape(-1, d)
            vals = np.array(
                [np.mean([data_model.loss(w, z) for z in sample]) for w in flat]
            )
            return vals.reshape(wb.shape[:-1])

    def value(wbatch):
        wb = np.asarray(wbatch, dtype=float)
        return data_value(wb) + ridge * np.sum(wb * wb, axis=-1)

    def grad(w):
        w = np.asarray(w, dtype=float)
        g = np.zeros(d)
        for z in sample:
            g += np.asarray(data_model.loss_gradient(w, z), dtype=float)
        return g / sample.shape[0] + 2.0 * ridge * w

    # constancy probe at two points: quadratic empirical risks (e.g. square
    # losses) get the analytic (minimizer, Hessian) pair for exact sampling
    quadratic = None
    hess0 = np.zeros((d, d))
    w0 = np.zeros(d)
    for z in sample:
        hess0 += np.asarray(data_model.loss_hessian(w0, z), dtype=float)
    hess0 = hess0 / sample.shape[0] + 2.0 * ridge * np.eye(d)
    w_probe = np.full(d, 0.61)
    hess1 = np.zeros((d, d))
    for z in sample:
        hess1 += np.asarray(data_model.loss_hessian(w_probe, z), dtype=float)
    hess1 = hess1 / sample.shape[0] + 2.0 * ridge * np.eye(d)
    if np.allclose(hess0, hess1, atol=1e-12) and np.linalg.eigvalsh(hess0)[0] > 0:
        w_min = w0 - np.linalg.solve(hess0, grad(w0))
        quadratic = (w_min, hess0)

    return GibbsTarget(
        dim=d,
        domain_box=np.array(land.domain_box),
        value=value,
        grad=grad,
        quadratic=quadratic,
        data_value=data_value,
    )


def default_step_size(target: GibbsTarget, gamma: float) -> float:
    """Step-size heuristic 0.5/(γ·λ_max(H)) from the Hessian scale at the start.

    For non-quadratic targets the curvature is probed by the gradient
    change over a small displacement from the box center.
    """
    if target.quadratic is not None:
        h = target.quadratic[1]
    else:
        center = target.domain_box.mean(axis=1)
        h_step = 1e-4
        g0 = np.asarray(target.grad(center), dtype=float)
        rows = []
        for k in range(target.dim):
            e = np.zeros(target.dim)
            e[k] = h_step
            rows.append((np.asarray(target.grad(center + e)) - g0) / h_step)
        h = np.abs(np.array(rows))
    lam_max = float(np.linalg.eigvalsh(0.5 * (h + h.T))[-1]) if h.ndim == 2 else float(h)
    lam_max = max(abs(lam_max), 1e-12)
    return 0.5 / (gamma * lam_max)


def _check_divergence(w: np.ndarray, box: np.ndarray, step_size: float) -> None:
    width = box[:, 1] - box[:, 0]
    if np.any(w < box[:, 0] - 10.0 * width) or np.any(w > box[:, 1] + 10.0 * width):
        raise DivergenceError(
            f"SGLD iterate left the domain box by more than 10 widths "
            f"(step_size={step_size}); reduce the step size"
        )


def sample_chain(
    kind: str,
    target: GibbsTarget,
    gamma: float,
    step_size: float,
    steps: int,
    burn_in: int,
    master_seed: int,
    chain_id: int = 0,
    noise_free: bool = False,
    restart_prob: float = 0.1,
) -> ChainBatch:
    """Run one chain targeting the Gibbs density of ``target`` at inverse
    temperature γ.

    sgld:           w ← w − η∇f(w) + √(2η/γ)·ξ with standard normal ξ
                    (``noise_free`` drops the noise, the γ→∞ limit).
    metropolis:     symmetric mixture proposal (local Gaussian of scale η,
                    probability ``restart_prob`` of a uniform draw over the
                    domain box), acceptance min(1, e^(−γΔf)); exact for the
                    box-truncated target. Proposals outside the box are
                    rejected.
    exact_gaussian: i.i.d. draws from N(w_min, (γH)⁻¹); requires a
                    quadratic target.

    The returned batch holds the ``steps − burn_in`` post-burn-in samples.
    """
    if kind not in CHAIN_KINDS:
        raise ArgumentError(f"unknown chain kind {kind!r}; choose from {CHAIN_KINDS}")
    if not step_size > 0.0:
        raise ArgumentError(f"step size must be positive, got {step_size}")
    if not (steps > burn_in >= 0):
        raise ArgumentError(f"need steps > burn_in >= 0, got steps={steps}, burn_in={burn_in}")
    if not gamma > 0.0:
        raise ArgumentError(f"gamma must be positive, got {gamma}")

    rng = np.random.default_rng(chain_seed(master_seed, chain_id))
    box = target.domain_box
    kept = steps - burn_in
    acceptance_rate = None

    if kind == "exact_gaussian":
        if target.quadratic is None:
            raise SamplerKindError(
                "exact_gaussian draws need a constant-Hessian (quadratic) target"
            )
        w_min, hess = target.quadratic
        chol = np.linalg.cholesky(np.atleast_2d(hess))
        normal = rng.standard_normal((kept, target.dim))
        # x = w_min + L^{-T} ξ / sqrt(γ) gives covariance (γ H)^{-1}.
        samples = w_min + np.linalg.solve(chol.T, normal.T).T / math.sqrt(gamma)
    elif kind == "sgld":
        noise_scale = 0.0 if noise_free else math.sqrt(2.0 * step_size / gamma)
        w = box.mean(axis=1)
        samples = np.empty((kept, target.dim))
        for t in range(steps):
            g = np.asarray(target.grad(w), dtype=float)
            w = w - step_size * g
            if noise_scale:
                w = w + noise_scale * rng.standard_normal(target.dim)
            _check_divergence(w, box, step_size)
            if t >= burn_in:
                samples[t - burn_in] = w
    else:  # metropolis
        w = box.mean(axis=1)
        fw = float(target.value(w))
        samples = np.empty((kept, target.dim))
        accepted = 0
        lo, hi = box[:, 0], box[:, 1]
        for t in range(steps):
            if restart_prob > 0.0 and rng.random() < restart_prob:
                proposal = rng.uniform(lo, hi)
            else:
                proposal = w + step_size * rng.standard_normal(target.dim)
            if np.all(proposal >= lo) and np.all(proposal <= hi):
                f_prop = float(target.value(proposal))
                if math.log(rng.random()) < -gamma * (f_prop - fw):
                    w, fw = proposal, f_prop
                    accepted += 1
            if t >= burn_in:
                samples[t - burn_in] = w
        acceptance_rate = accepted / steps

    return ChainBatch(
        samples=samples,
        kind=kind,
        master_seed=int(master_seed),
        chain_id=int(chain_id),
        step_size=float(step_size),
        burn_in=int(burn_in),
        steps=int(steps),
        acceptance_rate=acceptance_rate,
    )


def condition_on_region(
    batch: ChainBatch, region: EllipsoidSpec | None, complement: bool = False
) -> ChainBatch:
    """Keep the samples inside ``region`` (or outside, with ``complement``).

    Order is preserved; the retained fraction is recorded on the batch as
    an empirical region-mass estimate. ``region=None`` means the whole
    domain (identity on samples). Raises ConditioningError when fewer than
    100 samples survive, since conditional statistics would be unreliable.
    """
    if len(batch) == 0:
        raise ArgumentError("cannot condition an empty batch")
    if region is None:
        mask = np.ones(len(batch), dtype=bool)
    else:
        mask = np.asarray(region.contains(batch.samples), dtype=bool)
    if complement:
        mask = ~mask
    retained = batch.samples[mask]
    if retained.shape[0] < 100:
        raise ConditioningError(
            f"only {retained.shape[0]} samples remain after conditioning; "
            "need at least 100"
        )
    return replace(
        batch,
        samples=retained,
        region=region,
        region_complement=complement,
        retained_fraction=float(mask.mean()),
    )
