"""
Distribution functionals: KL divergence dispatch and cross entropy.

Closed forms are registered per exact (type(p), type(q)) pair; there is
no fallback estimation. ``monte_carlo_kl`` exists for cross-checking a
closed form and is never used by ``kl_divergence``.
"""
import logging
from typing import Callable, Dict, Tuple

import numpy as np

from .distributions import (
    Bernoulli, Beta, Categorical, Dirichlet, Distribution, Gamma, Laplace, MultivariateNormalDiag, Normal,
)
from .exceptions import DTypeError, KLNotImplemented
from .numcore import broadcast_shapes, digamma, lbeta, lgamma, softplus

logger = logging.getLogger('probability')

KLFn = Callable[[Distribution, Distribution], np.ndarray]

_KL_REGISTRY: Dict[Tuple[type, type], KLFn] = {}


def register_kl(type_p: type, type_q: type):
    """
    Decorator registering a closed-form KL(p || q) for an exact type pair::

        @register_kl(Normal, Normal)
        def _kl_normal_normal(p, q):
            ...

    Registering (P, Q) says nothing about (Q, P).
    """
    for t in (type_p, type_q):
        if not (isinstance(t, type) and issubclass(t, Distribution)):
            raise TypeError(f'Expected a Distribution subclass, got {t!r}')

    def decorator(fn: KLFn) -> KLFn:
        _KL_REGISTRY[type_p, type_q] = fn
        return fn

    return decorator


def registered_pairs():
    return sorted((p.__name__, q.__name__) for p, q in _KL_REGISTRY)


def kl_divergence(p: Distribution, q: Distribution) -> np.ndarray:
    """KL(p || q), elementwise over the broadcast batch shape."""
    fn = _KL_REGISTRY.get((type(p), type(q)))
    if fn is None:
        raise KLNotImplemented(
            f'No closed-form KL divergence registered for ({type(p).__name__}, {type(q).__name__})')
    if p._float_dtype != q._float_dtype:
        raise DTypeError(f'KL between {p._float_dtype} and {q._float_dtype} distributions')
    shape = broadcast_shapes(p.batch_shape, q.batch_shape)
    with np.errstate(divide='ignore', invalid='ignore'):
        value = fn(p, q)
    return np.array(np.broadcast_to(value, shape), dtype=p._float_dtype)


def cross_entropy(p: Distribution, q: Distribution) -> np.ndarray:
    """H(p, q) = H(p) + KL(p || q)."""
    return p.entropy() + kl_divergence(p, q)


def monte_carlo_kl(p: Distribution, q: Distribution, n: int, rng) -> Tuple[np.ndarray, np.ndarray]:
    """Estimate KL(p || q) from ``n`` draws of p; returns (estimate, standard error)."""
    x = p.sample((int(n),), rng)
    diff = p.log_prob(x) - q.log_prob(x)
    estimate = np.mean(diff, axis=0)
    stderr = np.std(diff, axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.full_like(estimate, np.nan)
    logger.info('Monte Carlo KL(%s || %s) over %d draws', p.name, q.name, n)
    return estimate, stderr


def _normal_kl(loc_p, scale_p, loc_q, scale_q):
    var_ratio = np.square(scale_p / scale_q)
    t1 = np.square((loc_p - loc_q) / scale_q)
    return 0.5 * (var_ratio + t1 - 1.0 - np.log(var_ratio))


@register_kl(Normal, Normal)
def _kl_normal_normal(p, q):
    return _normal_kl(p.loc, p.scale, q.loc, q.scale)


@register_kl(Laplace, Laplace)
def _kl_laplace_laplace(p, q):
    distance = np.abs(p.loc - q.loc)
    ratio = p.scale / q.scale
    return -np.log(ratio) + distance / q.scale + ratio * np.exp(-distance / p.scale) - 1.0


@register_kl(Gamma, Gamma)
def _kl_gamma_gamma(p, q):
    a_p, b_p = p.concentration, p.rate
    a_q, b_q = q.concentration, q.rate
    return ((a_p - a_q) * digamma(a_p) - lgamma(a_p) + lgamma(a_q)
            + a_q * (np.log(b_p) - np.log(b_q)) + a_p * (b_q - b_p) / b_p)


@register_kl(Beta, Beta)
def _kl_beta_beta(p, q):
    a1, b1 = p.concentration1, p.concentration0
    a2, b2 = q.concentration1, q.concentration0
    total = a1 + b1
    return (lbeta(a2, b2) - lbeta(a1, b1) + (a1 - a2) * digamma(a1) + (b1 - b2) * digamma(b1)
            + (a2 - a1 + b2 - b1) * digamma(total))


@register_kl(Bernoulli, Bernoulli)
def _kl_bernoulli_bernoulli(p, q):
    probs = p.probs
    one = np.where(probs > 0, probs * (softplus(-q.logits) - softplus(-p.logits)), 0.0)
    zero = np.where(probs < 1, (1.0 - probs) * (softplus(q.logits) - softplus(p.logits)), 0.0)
    return one + zero


@register_kl(Categorical, Categorical)
def _kl_categorical_categorical(p, q):
    terms = np.where(p.probs > 0, p.probs * (p.log_probs - q.log_probs), 0.0)
    return np.sum(terms, axis=-1)


@register_kl(Dirichlet, Dirichlet)
def _kl_dirichlet_dirichlet(p, q):
    a, b = p.concentration, q.concentration
    a0 = np.sum(a, axis=-1)
    b0 = np.sum(b, axis=-1)
    return ((lgamma(a0) - lgamma(b0)) + (np.sum(lgamma(b), axis=-1) - np.sum(lgamma(a), axis=-1))
            + np.sum((a - b) * (digamma(a) - digamma(a0)[..., None]), axis=-1))


@register_kl(MultivariateNormalDiag, MultivariateNormalDiag)
def _kl_mvndiag_mvndiag(p, q):
    return np.sum(_normal_kl(p.loc, p.scale_diag, q.loc, q.scale_diag), axis=-1)
