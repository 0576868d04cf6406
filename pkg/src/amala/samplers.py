"""Samplers: classic MALA, the adaptive-scale Langevin sampler, and HMC.

All three share the ChainState bookkeeping and, for the Langevin pair, the
Metropolis-Hastings acceptance step. Proposals are isotropic Gaussians
N(mean, scale * I); MALA uses the fixed scale eps^2 while the adaptive
sampler draws a fresh stochastic scale each step from the trajectory
history. The reverse-proposal density of the adaptive sampler reuses the
forward scale: the scale is a function of the pre-proposal history, which
both directions of a single step share.

Stream-draw order per step is fixed (scale update if any, proposal noise,
acceptance uniform) so chains replay bit-identically; zero-density
proposals are auto-rejected without consuming the acceptance uniform.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .adaptation import AdaptParams, sigma_update
from .rng import RngStream, split
from .targets import NEG_INF, TargetDensity


@dataclass
class ChainState:
    """Current chain position with cached target values and adaptation history."""

    theta: np.ndarray
    log_p: float
    grad: np.ndarray
    theta_prev: np.ndarray | None = None
    grad_prev: np.ndarray | None = None
    sigma: float = 1.0
    step: int = 0


@dataclass
class Proposal:
    """One Gaussian proposal with both transition densities.

    log_q_fwd is the log density of theta_star under N(mean_fwd,
    cov_scale_fwd * I); log_q_rev the log density of the current point under
    the reverse kernel centered at theta_star. Proposals landing on
    zero-density points carry auto_reject (the reverse mean is undefined
    there). log_p_star/grad_star cache target evaluations already done
    during proposing; mh_accept recomputes them from the target when absent.
    """

    theta_star: np.ndarray
    mean_fwd: np.ndarray
    cov_scale_fwd: float
    log_q_fwd: float
    log_q_rev: float
    log_p_star: float | None = None
    grad_star: np.ndarray | None = None
    auto_reject: bool = False


@dataclass
class HmcParams:
    """Leapfrog settings for the HMC baseline (identity mass matrix only)."""

    eps_leap: float = 0.05
    n_leap: int = 20
    mass: float = 1.0

    def __post_init__(self):
        if self.eps_leap <= 0:
            raise ValueError("eps_leap must be positive")
        if self.n_leap < 1:
            raise ValueError("n_leap must be at least 1")
        if self.mass != 1.0:
            raise ValueError("only the identity mass matrix is supported")


@dataclass
class Chain:
    """Post-burn-in samples of one chain plus run metadata."""

    samples: np.ndarray
    log_ps: np.ndarray
    accepted: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def acceptance_rate(self) -> float:
        return float(self.accepted.mean())


def gaussian_log_density(x, mean, scale: float) -> float:
    """Log density of x under the isotropic Gaussian N(mean, scale * I)."""
    x = np.asarray(x, dtype=float)
    diff = x - np.asarray(mean, dtype=float)
    d = diff.shape[0]
    return -0.5 * d * math.log(2.0 * math.pi * scale) - float(np.dot(diff, diff)) / (2.0 * scale)


def init_state(target: TargetDensity, init, sigma: float = 1.0) -> ChainState:
    """Chain state at the starting point; rejects zero-density inits."""
    theta = np.asarray(init, dtype=float).copy()
    log_p = target.log_density(theta)
    if log_p == NEG_INF:
        raise ValueError("initial point has zero density under the target")
    return ChainState(theta=theta, log_p=log_p, grad=target.grad_log_density(theta), sigma=sigma)


def _finish_proposal(
    state: ChainState, target: TargetDensity, mean_fwd: np.ndarray, scale: float, stream: RngStream
) -> Proposal:
    d = state.theta.shape[0]
    z = np.array(stream.normals(d))
    theta_star = mean_fwd + math.sqrt(scale) * z
    log_q_fwd = gaussian_log_density(theta_star, mean_fwd, scale)
    log_p_star = target.log_density(theta_star)
    if log_p_star == NEG_INF:
        return Proposal(
            theta_star=theta_star,
            mean_fwd=mean_fwd,
            cov_scale_fwd=scale,
            log_q_fwd=log_q_fwd,
            log_q_rev=math.nan,
            log_p_star=log_p_star,
            auto_reject=True,
        )
    grad_star = target.grad_log_density(theta_star)
    return Proposal(
        theta_star=theta_star,
        mean_fwd=mean_fwd,
        cov_scale_fwd=scale,
        log_q_fwd=log_q_fwd,
        log_q_rev=math.nan,
        log_p_star=log_p_star,
        grad_star=grad_star,
    )


def mala_propose(state: ChainState, target: TargetDensity, eps: float, stream: RngStream) -> Proposal:
    """Euler-discretized Langevin proposal with fixed covariance eps^2 * I."""
    drift = 0.5 * eps * eps
    mean_fwd = state.theta + drift * state.grad
    prop = _finish_proposal(state, target, mean_fwd, eps * eps, stream)
    if not prop.auto_reject:
        mean_rev = prop.theta_star + drift * prop.grad_star
        prop.log_q_rev = gaussian_log_density(state.theta, mean_rev, prop.cov_scale_fwd)
    return prop


def adaptive_propose(
    state: ChainState, target: TargetDensity, params: AdaptParams, stream: RngStream
) -> Proposal:
    """Langevin proposal whose covariance scale adapts to trajectory history.

    Step 0 has no history pair, so it falls back to the classic MALA
    proposal with scale eps^2; adaptation starts at step 1.
    """
    if state.theta_prev is None:
        return mala_propose(state, target, params.eps, stream)
    scale = sigma_update(
        state.theta, state.theta_prev, state.grad, state.grad_prev, state.sigma, params, stream
    )
    drift = 0.5 * params.eps * params.eps
    mean_fwd = state.theta + drift * state.grad
    prop = _finish_proposal(state, target, mean_fwd, scale, stream)
    if not prop.auto_reject:
        mean_rev = prop.theta_star + drift * prop.grad_star
        prop.log_q_rev = gaussian_log_density(state.theta, mean_rev, scale)
    return prop


def log_accept_ratio(state: ChainState, prop: Proposal, target: TargetDensity | None = None) -> float:
    """Uncapped log acceptance ratio; -inf for auto-rejected proposals."""
    if prop.auto_reject:
        return NEG_INF
    log_p_star = prop.log_p_star
    if log_p_star is None:
        if target is None:
            raise ValueError("proposal carries no cached log density and no target was given")
        log_p_star = target.log_density(prop.theta_star)
    if log_p_star == NEG_INF:
        return NEG_INF
    return log_p_star + prop.log_q_rev - state.log_p - prop.log_q_fwd


def acceptance_probability(
    state: ChainState, prop: Proposal, target: TargetDensity | None = None
) -> float:
    """min(1, p(theta*) q(theta|theta*) / (p(theta) q(theta*|theta)))."""
    return math.exp(min(0.0, log_accept_ratio(state, prop, target)))


def _advance(state: ChainState, theta, log_p, grad, sigma: float) -> ChainState:
    # history shifts forward on accept and reject alike, so repeated
    # rejection drives the norm ratios to 1 and shrinks the adaptive scale
    return ChainState(
        theta=theta,
        log_p=log_p,
        grad=grad,
        theta_prev=state.theta,
        grad_prev=state.grad,
        sigma=sigma,
        step=state.step + 1,
    )


def mh_accept(
    state: ChainState, prop: Proposal, target: TargetDensity, stream: RngStream
) -> tuple[ChainState, bool]:
    """Metropolis-Hastings accept/reject; returns the next state.

    Zero-density proposals reject without consuming a uniform; every other
    step consumes exactly one.
    """
    log_alpha = log_accept_ratio(state, prop, target)
    if log_alpha == NEG_INF:
        return _advance(state, state.theta, state.log_p, state.grad, prop.cov_scale_fwd), False
    u = stream.next_uniform()
    if log_alpha >= 0.0 or u < math.exp(log_alpha):
        log_p_star = prop.log_p_star
        if log_p_star is None:
            log_p_star = target.log_density(prop.theta_star)
        grad_star = prop.grad_star
        if grad_star is None:
            grad_star = target.grad_log_density(prop.theta_star)
        return _advance(state, prop.theta_star, log_p_star, grad_star, prop.cov_scale_fwd), True
    return _advance(state, state.theta, state.log_p, state.grad, prop.cov_scale_fwd), False


def leapfrog(
    theta, momentum, params: HmcParams, target: TargetDensity
) -> tuple[np.ndarray, np.ndarray, bool]:
    """n_leap leapfrog iterations (half-kick, drift, half-kick).

    Returns (theta, momentum, diverged); diverged flags a trajectory that
    drifted onto a zero-density point, where the gradient is undefined.
    """
    theta = np.asarray(theta, dtype=float).copy()
    p = np.asarray(momentum, dtype=float).copy()
    if params.n_leap == 0:
        return theta, p, False
    half = 0.5 * params.eps_leap
    grad = target.grad_log_density(theta)
    for _ in range(params.n_leap):
        p = p + half * grad
        theta = theta + params.eps_leap * p
        if target.log_density(theta) == NEG_INF:
            return theta, p, True
        grad = target.grad_log_density(theta)
        p = p + half * grad
    return theta, p, False


def hmc_step(
    state: ChainState, params: HmcParams, target: TargetDensity, stream: RngStream
) -> tuple[ChainState, bool]:
    """One HMC transition: momentum refresh, leapfrog, energy-error accept."""
    d = state.theta.shape[0]
    p0 = np.array(stream.normals(d))
    theta_star, p_star, diverged = leapfrog(state.theta, p0, params, target)
    if diverged:
        return _advance(state, state.theta, state.log_p, state.grad, state.sigma), False
    log_p_star = target.log_density(theta_star)
    h_old = -state.log_p + 0.5 * float(np.dot(p0, p0))
    h_new = -log_p_star + 0.5 * float(np.dot(p_star, p_star))
    log_alpha = h_old - h_new
    u = stream.next_uniform()
    if log_alpha >= 0.0 or u < math.exp(log_alpha):
        grad_star = target.grad_log_density(theta_star)
        return _advance(state, theta_star, log_p_star, grad_star, state.sigma), True
    return _advance(state, state.theta, state.log_p, state.grad, state.sigma), False


class MalaSampler:
    """Classic MALA with fixed step size."""

    name = "mala"

    def __init__(self, eps: float):
        if eps <= 0:
            raise ValueError("eps must be positive")
        self.eps = eps

    def initial_sigma(self) -> float:
        return self.eps * self.eps

    def params_dict(self) -> dict:
        return {"name": self.name, "eps": self.eps}

    def step(self, state: ChainState, target: TargetDensity, stream: RngStream):
        prop = mala_propose(state, target, self.eps, stream)
        return mh_accept(state, prop, target, stream)


class AdaptiveSampler:
    """Langevin sampler with the stochastic history-driven proposal scale."""

    name = "adaptive"

    def __init__(self, params: AdaptParams):
        self.params = params

    def initial_sigma(self) -> float:
        return self.params.sigma0

    def params_dict(self) -> dict:
        p = self.params
        return {
            "name": self.name,
            "eps": p.eps,
            "beta": p.beta,
            "xi": p.xi,
            "sigma0": p.sigma0,
            "base_floor": p.base_floor,
            "norm_floor": p.norm_floor,
        }

    def step(self, state: ChainState, target: TargetDensity, stream: RngStream):
        prop = adaptive_propose(state, target, self.params, stream)
        return mh_accept(state, prop, target, stream)


class HmcSampler:
    """Hamiltonian Monte Carlo baseline with fixed leapfrog settings."""

    name = "hmc"

    def __init__(self, params: HmcParams):
        self.params = params

    def initial_sigma(self) -> float:
        return 1.0

    def params_dict(self) -> dict:
        return {"name": self.name, "eps_leap": self.params.eps_leap, "n_leap": self.params.n_leap}

    def step(self, state: ChainState, target: TargetDensity, stream: RngStream):
        return hmc_step(state, self.params, target, stream)


def make_sampler(cfg: Mapping):
    """Build a sampler from its config block ({'name': ..., params...})."""
    cfg = dict(cfg)
    name = cfg.pop("name", None)
    if name == "mala":
        return MalaSampler(eps=cfg["eps"])
    if name == "adaptive":
        return AdaptiveSampler(AdaptParams(**cfg))
    if name == "hmc":
        return HmcSampler(HmcParams(**cfg))
    raise ValueError(f"unknown sampler: {name!r}")


def run_chain(
    sampler_cfg,
    target: TargetDensity,
    n: int,
    burn_in: int,
    init,
    seed: int,
    chain_id: int,
) -> Chain:
    """Run one chain and return its post-burn-in samples.

    The chain draws from split(seed, chain_id) only, so reruns with the
    same arguments reproduce the chain exactly. Wall time covers the
    sampling loop alone.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    sampler = make_sampler(sampler_cfg) if isinstance(sampler_cfg, Mapping) else sampler_cfg
    stream = split(seed, chain_id)
    state = init_state(target, init, sigma=sampler.initial_sigma())
    d = state.theta.shape[0]
    samples = np.empty((n, d))
    log_ps = np.empty(n)
    accepted = np.empty(n, dtype=bool)
    t0 = time.perf_counter()
    for i in range(burn_in + n):
        state, acc = sampler.step(state, target, stream)
        if i >= burn_in:
            j = i - burn_in
            samples[j] = state.theta
            log_ps[j] = state.log_p
            accepted[j] = acc
    wall = time.perf_counter() - t0
    meta = {
        "sampler": sampler.name,
        "target": target.name,
        "seed": int(seed),
        "chain_id": int(chain_id),
        "params": sampler.params_dict(),
        "n": int(n),
        "burn_in": int(burn_in),
        "init": [float(v) for v in np.asarray(init, dtype=float)],
        "wall_time_s": wall,
    }
    return Chain(samples=samples, log_ps=log_ps, accepted=accepted, meta=meta)
