"""
Distributions of Y = F(X) for a base distribution over X and a bijector F.
"""
import numpy as np

from ..exceptions import ShapeError
from ..numcore import as_shape, prod
from .base import Distribution


class TransformedDistribution(Distribution):
    """
    Pushes ``distribution`` through ``bijector``.

    ``batch_shape`` and ``event_shape`` overrides replicate a base whose
    own shapes are smaller: the base batch must be a right-aligned suffix
    of the batch override, and an event override needs a scalar base.
    """

    def __init__(self, distribution: Distribution, bijector, batch_shape=None, event_shape=None,
                 validate_args=False, name=None):
        base_batch = distribution.batch_shape
        base_event = distribution.event_shape
        if batch_shape is None:
            batch = base_batch
        else:
            batch = as_shape(batch_shape)
            if len(base_batch) > len(batch) or batch[len(batch) - len(base_batch):] != base_batch:
                raise ShapeError(f'Base batch shape {list(base_batch)} is not a suffix of {list(batch)}')
        if event_shape is None:
            self._event_override = ()
            inner_event = base_event
        else:
            self._event_override = as_shape(event_shape)
            if base_event or base_batch:
                raise ShapeError('An event_shape override requires a scalar base distribution')
            inner_event = self._event_override
        # extra leading dims the base must draw to fill the overrides
        self._replicas = batch[:len(batch) - len(base_batch)] + self._event_override
        self._distribution = distribution
        self._bijector = bijector
        self._inner_event = inner_event
        super().__init__(
            dtype=distribution._float_dtype,
            reparameterization_type=distribution.reparameterization_type,
            validate_args=validate_args,
            allow_nan_stats=distribution.allow_nan_stats,
            parameters=distribution.parameters,
            name=name or f'{bijector.name}{distribution.name}',
            batch_shape=batch,
            event_shape=bijector.forward_event_shape(inner_event),
        )

    @property
    def distribution(self) -> Distribution:
        return self._distribution

    @property
    def bijector(self):
        return self._bijector

    # Sampling.

    def _sample(self, sample_shape, rng):
        x = self._distribution.sample(tuple(sample_shape) + self._replicas, rng)
        return self._bijector.forward(x)

    def _sample_noise(self, sample_shape, rng):
        return self._distribution._sample_noise(tuple(sample_shape) + self._replicas, rng)

    def _transform_noise(self, noise, params):
        return self._bijector.forward(self._distribution._transform_noise(noise, params))

    # Densities.

    def _base_log_prob(self, x):
        lp = self._distribution.log_prob(x)
        if self._event_override:
            lp = np.sum(lp, axis=tuple(range(-len(self._event_override), 0)))
        return lp

    def _log_prob(self, y):
        event_ndims = len(self.event_shape)
        if self._bijector.is_injective:
            x = self._bijector.inverse(y)
            ildj = self._bijector.inverse_log_det_jacobian(y, event_ndims)
            return self._base_log_prob(x) + ildj
        branches = self._bijector.inverse_branches(y)
        ildjs = self._bijector.inverse_log_det_jacobian(y, event_ndims)
        axes = tuple(range(-event_ndims, 0))
        terms = []
        for x, ildj in zip(branches, ildjs):
            hit = np.isclose(self._bijector.forward(x), y, rtol=1e-12, atol=0.0)
            if axes:
                hit = np.all(hit, axis=axes)
            terms.append(np.where(hit, self._base_log_prob(x) + ildj, -np.inf))
        # branches of a covering add their densities
        return np.logaddexp.reduce(np.stack(np.broadcast_arrays(*terms)), axis=0)

    # Statistics that shift analytically under a constant jacobian.

    def _is_affine(self) -> bool:
        b = self._bijector
        return b.is_constant_jacobian and b.is_injective

    def _base_statistic(self, fn):
        value = fn()
        return np.broadcast_to(value, self.batch_shape + self._inner_event)

    def _constant_fldj(self, event_ndims):
        x = np.zeros(self.batch_shape + self._inner_event, dtype=self._float_dtype)
        return self._bijector.forward_log_det_jacobian(x, event_ndims)

    def _mean(self):
        if not self._is_affine():
            raise NotImplementedError(f'{self.name}: mean is only analytic for affine bijectors')
        return self._bijector.forward(np.array(self._base_statistic(self._distribution.mean)))

    def _variance(self):
        if not (self._is_affine() and self._bijector.is_elementwise):
            raise NotImplementedError(f'{self.name}: variance is only analytic for elementwise affine bijectors')
        base = self._base_statistic(self._distribution.variance)
        return base * np.exp(2.0 * self._constant_fldj(0))

    def _entropy(self):
        if not self._is_affine():
            raise NotImplementedError(f'{self.name}: entropy is only analytic for constant-jacobian bijectors')
        base = self._distribution.entropy()
        if self._event_override:
            base = base * prod(self._event_override)
        return base + self._constant_fldj(len(self._inner_event))
