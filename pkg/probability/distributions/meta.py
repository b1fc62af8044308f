"""
Higher-order distributions built from other distributions.
"""
import logging
from typing import Callable, Optional, Sequence

import numpy as np

from ..exceptions import EmptyPoints, InvalidParameter, NonConvergentSpec, RankError, ShapeError
from ..numcore import as_ndvalue, as_shape, broadcast_all, broadcast_shapes, log_sum_exp, sum_rightmost
from .base import NOT_REPARAMETERIZED, Distribution
from .continuous import Normal
from .discrete import Categorical

logger = logging.getLogger('probability')


class Independent(Distribution):
    """
    Reinterprets the rightmost ``reinterpreted_batch_ndims`` batch dims of
    ``distribution`` as event dims; log_prob sums over them.
    """

    def __init__(self, distribution: Distribution, reinterpreted_batch_ndims: int = 1,
                 validate_args=False, name=None):
        rank = int(reinterpreted_batch_ndims)
        inner_batch = distribution.batch_shape
        if rank < 0 or rank > len(inner_batch):
            raise RankError(
                f'reinterpreted_batch_ndims={rank} exceeds the batch rank {len(inner_batch)} '
                f'of {distribution.name}'
            )
        split = len(inner_batch) - rank
        self._distribution = distribution
        self._rank = rank
        self._integer_support = distribution._integer_support
        super().__init__(
            dtype=distribution._float_dtype,
            reparameterization_type=distribution.reparameterization_type,
            validate_args=validate_args,
            allow_nan_stats=distribution.allow_nan_stats,
            parameters=distribution.parameters,
            name=name or f'Independent{distribution.name}',
            batch_shape=inner_batch[:split],
            event_shape=inner_batch[split:] + distribution.event_shape,
        )

    @property
    def distribution(self) -> Distribution:
        return self._distribution

    @property
    def reinterpreted_batch_ndims(self) -> int:
        return self._rank

    def _sample(self, sample_shape, rng):
        return self._distribution.sample(sample_shape, rng)

    def _sample_noise(self, sample_shape, rng):
        return self._distribution._sample_noise(sample_shape, rng)

    def _transform_noise(self, noise, params):
        return self._distribution._transform_noise(noise, params)

    def _log_prob(self, x):
        return sum_rightmost(self._distribution.log_prob(x), self._rank)

    def _prob(self, x):
        return np.exp(self._log_prob(x))

    def _mean(self):
        return self._distribution.mean()

    def _variance(self):
        return self._distribution.variance()

    def _stddev(self):
        return self._distribution.stddev()

    def _mode(self):
        return self._distribution.mode()

    def _entropy(self):
        return sum_rightmost(self._distribution.entropy(), self._rank)


def _sample_over_batch(dist: Distribution, sample_shape, batch_shape, rng) -> np.ndarray:
    """
    Draws of ``dist`` shaped ``sample_shape + batch_shape + event_shape``,
    independent across every batch member, including the leading and size-1
    batch dims that ``dist`` itself broadcasts into ``batch_shape``.
    """
    sample_shape, batch_shape = tuple(sample_shape), tuple(batch_shape)
    inner = dist.batch_shape
    lead = batch_shape[:len(batch_shape) - len(inner)]
    if batch_shape[len(lead):] == inner:
        return dist.sample(sample_shape + lead, rng)
    # a full inner batch per slot, then the diagonal matching each slot
    x = dist.sample(sample_shape + batch_shape, rng)
    grids = np.ix_(*(np.arange(d) for d in batch_shape))
    inner_index = tuple(grids[len(lead) + j] if size != 1 else 0 for j, size in enumerate(inner))
    return x[(slice(None),) * len(sample_shape) + grids + inner_index]


def _check_mixture_weights(cat: Categorical, validate_args: bool):
    if not isinstance(cat, Categorical):
        raise InvalidParameter('mixture_distribution must be a Categorical')
    if validate_args and not np.allclose(np.sum(cat.probs, axis=-1), 1.0):
        raise InvalidParameter('mixture weights must lie on the simplex')


class Mixture(Distribution):
    """
    p(x) = sum_k pi_k p_k(x) over a list of components sharing one event shape.
    Sampling is ancestral: draw k, then the chosen component.
    """

    def __init__(self, cat: Categorical, components: Sequence[Distribution], validate_args=False,
                 allow_nan_stats=True, name='Mixture'):
        components = list(components)
        if not components:
            raise InvalidParameter('Mixture needs at least one component')
        _check_mixture_weights(cat, validate_args)
        if cat.num_categories != len(components):
            raise InvalidParameter(
                f'Mixture has {len(components)} components but {cat.num_categories} weights')
        event = components[0].event_shape
        for component in components[1:]:
            if component.event_shape != event:
                raise ShapeError(
                    f'Mixture components disagree on event shape: {list(event)} vs '
                    f'{list(component.event_shape)}')
        dtypes = {c.dtype for c in components}
        if len(dtypes) > 1:
            raise InvalidParameter('Mixture components must share one dtype')
        self._cat = cat
        self._components = components
        self._integer_support = all(c._integer_support for c in components)
        super().__init__(
            dtype=components[0]._float_dtype,
            reparameterization_type=NOT_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters={'probs': cat.probs}, name=name,
            batch_shape=broadcast_all([cat.batch_shape] + [c.batch_shape for c in components]),
            event_shape=event,
        )

    @property
    def cat(self) -> Categorical:
        return self._cat

    @property
    def components(self):
        return list(self._components)

    @property
    def num_components(self) -> int:
        return len(self._components)

    def _sample(self, sample_shape, rng):
        rngs = rng.split(len(self._components) + 1)
        shape = tuple(sample_shape) + self.batch_shape
        index = _sample_over_batch(self._cat, sample_shape, self.batch_shape, rngs[0])
        index = index.reshape(shape + (1,) * len(self.event_shape))
        out = None
        for k, component in enumerate(self._components):
            draw = _sample_over_batch(component, sample_shape, self.batch_shape, rngs[k + 1])
            out = np.array(draw) if out is None else np.where(index == k, draw, out)
        return out

    def _weighted_log_probs(self, x):
        log_probs = self._cat.log_probs
        return [log_probs[..., k] + component.log_prob(x) for k, component in enumerate(self._components)]

    def _log_prob(self, x):
        terms = np.broadcast_arrays(*self._weighted_log_probs(x))
        return log_sum_exp(np.stack(terms, axis=-1), axis=-1)

    def _weights(self):
        # pi_k shaped to broadcast against batch + event
        return [self._cat.probs[..., k].reshape(self._cat.batch_shape + (1,) * len(self.event_shape))
                for k in range(len(self._components))]

    def _mean(self):
        return sum(w * c.mean() for w, c in zip(self._weights(), self._components))

    def _variance(self):
        mean = self._mean()
        second = sum(w * (c.variance() + np.square(c.mean())) for w, c in zip(self._weights(), self._components))
        return second - np.square(mean)

    def entropy_lower_bound(self) -> np.ndarray:
        """sum_k pi_k H(component_k), a lower bound on the mixture entropy."""
        probs = self._cat.probs
        value = sum(probs[..., k] * c.entropy() for k, c in enumerate(self._components))
        return self._statistic(value, 'entropy_lower_bound', event=False)


class MixtureSameFamily(Distribution):
    """
    Mixture whose components are the rightmost batch dimension of one
    batched distribution.
    """

    def __init__(self, mixture_distribution: Categorical, components_distribution: Distribution,
                 validate_args=False, allow_nan_stats=True, name='MixtureSameFamily'):
        _check_mixture_weights(mixture_distribution, validate_args)
        components = components_distribution
        if not components.batch_shape:
            raise RankError('components_distribution needs a batch dimension indexing components')
        k = components.batch_shape[-1]
        if mixture_distribution.num_categories != k:
            raise InvalidParameter(
                f'{mixture_distribution.num_categories} mixture weights for {k} components')
        self._cat = mixture_distribution
        self._components = components
        self._integer_support = components._integer_support
        super().__init__(
            dtype=components._float_dtype,
            reparameterization_type=NOT_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters={'probs': mixture_distribution.probs},
            name=name,
            batch_shape=broadcast_shapes(mixture_distribution.batch_shape, components.batch_shape[:-1]),
            event_shape=components.event_shape,
        )

    @property
    def mixture_distribution(self) -> Categorical:
        return self._cat

    @property
    def components_distribution(self) -> Distribution:
        return self._components

    def _component_axis(self, ndim: int) -> int:
        return ndim - len(self.event_shape) - 1

    def _sample(self, sample_shape, rng):
        cat_rng, component_rng = rng.split(2)
        shape = tuple(sample_shape) + self.batch_shape
        index = _sample_over_batch(self._cat, sample_shape, self.batch_shape, cat_rng)
        draws = _sample_over_batch(
            self._components, sample_shape, self.batch_shape + self._components.batch_shape[-1:], component_rng)
        index = index.reshape(shape + (1,) * (len(self.event_shape) + 1))
        index = np.broadcast_to(index, shape + (1,) + self.event_shape)
        picked = np.take_along_axis(draws, index.astype(np.intp), axis=self._component_axis(draws.ndim))
        return np.squeeze(picked, axis=self._component_axis(draws.ndim))

    def _log_prob(self, x):
        # one copy of x per component, on the component axis
        expanded = np.expand_dims(x, axis=self._component_axis(x.ndim + 1))
        component_lp = self._components.log_prob(expanded)
        return log_sum_exp(component_lp + self._cat.log_probs, axis=-1)

    def _weights(self):
        probs = self._cat.probs
        return probs.reshape(probs.shape + (1,) * len(self.event_shape))

    def _mean(self):
        axis = -(len(self.event_shape) + 1)
        return np.sum(self._weights() * self._components.mean(), axis=axis)

    def _variance(self):
        axis = -(len(self.event_shape) + 1)
        mean = np.expand_dims(self._mean(), axis)
        spread = self._components.variance() + np.square(self._components.mean() - mean)
        return np.sum(self._weights() * spread, axis=axis)

    def entropy_lower_bound(self) -> np.ndarray:
        """sum_k pi_k H(component_k), a lower bound on the mixture entropy."""
        value = np.sum(self._cat.probs * self._components.entropy(), axis=-1)
        return self._statistic(value, 'entropy_lower_bound', event=False)


class Autoregressive(Distribution):
    """
    The fixed point of ``x <- distribution_fn(x).sample()`` after
    ``num_steps`` iterations, starting from ``sample0`` (zeros by default).

    ``log_prob(x)`` is ``distribution_fn(x).log_prob(x)``, which is exact
    when output i of ``distribution_fn`` only depends on x[:i].

    The event shape is learned by one call of ``distribution_fn``: on
    ``sample0`` when given, else on zeros of ``event_shape`` when given,
    else on a scalar zero, which a function indexing ``x[..., i]`` rejects.
    """

    def __init__(self, distribution_fn: Callable[[np.ndarray], Distribution],
                 num_steps: Optional[int] = None, sample0=None, event_shape=None, validate_args=False,
                 allow_nan_stats=True, name='Autoregressive'):
        if sample0 is not None:
            first = distribution_fn(as_ndvalue(sample0))
        else:
            first = distribution_fn(np.zeros(() if event_shape is None else as_shape(event_shape)))
        if event_shape is not None and first.event_shape != as_shape(event_shape):
            raise NonConvergentSpec(
                f'{name}: declared event shape {list(as_shape(event_shape))} but the distribution '
                f'function gives {list(first.event_shape)}')
        event = first.event_shape
        if sample0 is None:
            sample0 = np.zeros(first.batch_shape + event, dtype=first.dtype)
            first = distribution_fn(sample0)
        steps = int(np.prod(event, dtype=np.int64)) if num_steps is None else int(num_steps)
        if steps < 1:
            raise InvalidParameter(f'num_steps must be >= 1, got {steps}')
        self._distribution_fn = distribution_fn
        self._num_steps = steps
        self._sample0 = as_ndvalue(sample0)
        self._integer_support = first._integer_support
        super().__init__(
            dtype=first._float_dtype,
            reparameterization_type=NOT_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters={}, name=name,
            batch_shape=first.batch_shape, event_shape=event,
        )

    @property
    def num_steps(self) -> int:
        return self._num_steps

    @property
    def distribution_fn(self):
        return self._distribution_fn

    def _make(self, x) -> Distribution:
        dist = self._distribution_fn(x)
        if dist.event_shape != self.event_shape:
            raise NonConvergentSpec(
                f'{self.name}: event shape changed from {list(self.event_shape)} '
                f'to {list(dist.event_shape)}')
        return dist

    def _sample(self, sample_shape, rng):
        shape = tuple(sample_shape) + self.batch_shape + self.event_shape
        x = np.array(np.broadcast_to(self._sample0, shape))
        for step_rng in rng.split(self._num_steps):
            dist = self._make(x)
            rank = len(dist.batch_shape) + len(dist.event_shape)
            x = dist.sample(x.shape[:x.ndim - rank], step_rng)
        logger.debug('%s ran %d steps', self.name, self._num_steps)
        return x

    def _log_prob(self, x):
        return self._make(x).log_prob(x)


def kde(points, kernel_builder: Optional[Callable[[np.ndarray], Distribution]] = None,
        bandwidth: float = 1.0, validate_args: bool = False, dtype=None) -> MixtureSameFamily:
    """
    Kernel density estimate: a uniform mixture of kernels centered at ``points``.

    ``points`` has shape [n] + event. ``kernel_builder`` maps the points to a
    distribution whose rightmost batch dim indexes them; the default is a
    Normal of scale ``bandwidth`` per coordinate.
    """
    points = as_ndvalue(points, dtype)
    if points.dtype.kind != 'f':
        points = points.astype(np.float64)
    if points.ndim == 0 or points.shape[0] == 0:
        raise EmptyPoints('kde needs at least one point')
    n = points.shape[0]
    if kernel_builder is None:
        def kernel_builder(locs):
            return Independent(Normal(locs, np.array(bandwidth, dtype=locs.dtype)),
                               reinterpreted_batch_ndims=locs.ndim - 1)
    kernels = kernel_builder(points)
    return MixtureSameFamily(
        mixture_distribution=Categorical(probs=np.array([1.0 / n] * n, dtype=points.dtype)),
        components_distribution=kernels,
        validate_args=validate_args,
        name='KernelDensityEstimate',
    )
