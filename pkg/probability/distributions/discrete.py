"""
Discrete families. Samples are I64; densities accept any numeric value.
"""
import numpy as np
from scipy import special as sp

from .. import rng as rng_lib
from ..exceptions import InvalidParameter
from ..numcore import I64, lgamma, log_softmax, softplus
from .base import (
    NOT_REPARAMETERIZED, Distribution, check_exclusive, check_positive,
    convert_params, noise_shape,
)


def _is_integer(x):
    return np.floor(x) == x


class Bernoulli(Distribution):
    """Bernoulli over {0, 1}, parameterized by ``logits`` or ``probs``."""
    _param_event_ranks = {'logits': 0, 'probs': 0}
    _integer_support = True

    def __init__(self, logits=None, probs=None, validate_args=False, allow_nan_stats=True,
                 dtype=None, name='Bernoulli'):
        given = check_exclusive({'logits': logits, 'probs': probs}, 'logits', 'probs')
        params, dtype = convert_params({'logits': logits, 'probs': probs}, dtype)
        if given == 'probs':
            probs = params['probs']
            if validate_args and np.any((probs < 0) | (probs > 1)):
                raise InvalidParameter('probs must lie in [0, 1]')
            with np.errstate(divide='ignore'):
                self._logits = np.log(probs) - np.log1p(-probs)
            self._probs = probs
        else:
            self._logits = params['logits']
            self._probs = sp.expit(self._logits)
        super().__init__(
            dtype=dtype, reparameterization_type=NOT_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters=params, name=name,
        )

    @property
    def logits(self):
        return self._logits

    @property
    def probs(self):
        return self._probs

    def _sample(self, sample_shape, rng):
        u = rng_lib.uniform(rng, noise_shape(self, sample_shape), self._float_dtype)
        return (u < self._probs).astype(I64)

    def _in_support(self, x):
        return (x == 0) | (x == 1)

    def _log_prob(self, x):
        lp = np.where(x == 1, -softplus(-self._logits), -softplus(self._logits))
        return np.where(self._in_support(x), lp, -np.inf)

    def _cdf(self, x):
        return np.where(x < 0, 0.0, np.where(x < 1, 1.0 - self._probs, 1.0))

    def _mean(self):
        return self._probs

    def _variance(self):
        return self._probs * (1.0 - self._probs)

    def _mode(self):
        return (self._probs > 0.5).astype(self._float_dtype)

    def _entropy(self):
        return self._probs * softplus(-self._logits) + (1.0 - self._probs) * softplus(self._logits)


class _CategoricalBase(Distribution):
    """Shared parameter handling for distributions over K categories."""
    _param_event_ranks = {'logits': 1, 'probs': 1}

    def __init__(self, logits, probs, validate_args, allow_nan_stats, dtype, name, event_shape):
        given = check_exclusive({'logits': logits, 'probs': probs}, 'logits', 'probs')
        params, dtype = convert_params({'logits': logits, 'probs': probs}, dtype)
        value = params[given]
        if value.ndim < 1 or value.shape[-1] < 1:
            raise InvalidParameter(f'{given} must have a non-empty trailing category axis')
        if given == 'probs':
            if validate_args and (np.any(value < 0)
                                  or not np.allclose(value.sum(-1), 1.0, atol=1e-6)):
                raise InvalidParameter('probs must lie on the simplex')
            self._probs = value
            with np.errstate(divide='ignore'):
                self._log_probs = np.log(value)
            self._logits = self._log_probs
        else:
            self._logits = value
            self._log_probs = log_softmax(value)
            self._probs = np.exp(self._log_probs)
        self._num_categories = value.shape[-1]
        super().__init__(
            dtype=dtype, reparameterization_type=NOT_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters=params, name=name, event_shape=event_shape(value.shape[-1]),
        )

    @property
    def logits(self):
        return self._logits

    @property
    def probs(self):
        return self._probs

    @property
    def log_probs(self):
        """Normalized log-probabilities, shape batch + [K]."""
        return self._log_probs

    @property
    def num_categories(self) -> int:
        return self._num_categories

    def _draw_indices(self, sample_shape, rng):
        # first k with u < cumsum(probs)[k]
        shape = tuple(sample_shape) + self.batch_shape
        u = rng_lib.uniform(rng, shape, self._float_dtype)
        cdf = np.cumsum(self._probs, axis=-1)
        k = np.sum(cdf <= u[..., None], axis=-1)
        return np.minimum(k, self._num_categories - 1).astype(I64)

    def _entropy(self):
        plogp = np.where(self._probs > 0, self._probs * self._log_probs, 0.0)
        return -np.sum(plogp, axis=-1)


class Categorical(_CategoricalBase):
    """Categorical over {0, ..., K-1}; scalar event, I64 samples."""
    _integer_support = True

    def __init__(self, logits=None, probs=None, validate_args=False, allow_nan_stats=True,
                 dtype=None, name='Categorical'):
        super().__init__(logits, probs, validate_args, allow_nan_stats, dtype, name,
                         event_shape=lambda k: ())

    def _sample(self, sample_shape, rng):
        return self._draw_indices(sample_shape, rng)

    def _in_support(self, x):
        return (x >= 0) & (x < self._num_categories) & _is_integer(x)

    def _log_prob(self, x):
        shape = np.broadcast_shapes(x.shape, self.batch_shape)
        valid = np.broadcast_to(self._in_support(x), shape)
        index = np.where(valid, np.broadcast_to(x, shape), 0).astype(np.intp)
        table = np.broadcast_to(self._log_probs, shape + (self._num_categories,))
        picked = np.take_along_axis(table, index[..., None], axis=-1)[..., 0]
        return np.where(valid, picked, -np.inf)

    def _cdf(self, x):
        shape = np.broadcast_shapes(x.shape, self.batch_shape)
        k = np.floor(np.broadcast_to(x, shape))
        cdf = np.broadcast_to(np.cumsum(self._probs, axis=-1), shape + (self._num_categories,))
        index = np.clip(k, 0, self._num_categories - 1).astype(np.intp)
        picked = np.take_along_axis(cdf, index[..., None], axis=-1)[..., 0]
        return np.where(k < 0, 0.0, np.where(k >= self._num_categories, 1.0, picked))

    def _mode(self):
        return np.argmax(self._probs, axis=-1)


class OneHotCategorical(_CategoricalBase):
    """Categorical with one-hot outcomes; event shape [K]."""
    _integer_support = True

    def __init__(self, logits=None, probs=None, validate_args=False, allow_nan_stats=True,
                 dtype=None, name='OneHotCategorical'):
        super().__init__(logits, probs, validate_args, allow_nan_stats, dtype, name,
                         event_shape=lambda k: (k,))

    def _sample(self, sample_shape, rng):
        k = self._draw_indices(sample_shape, rng)
        return np.eye(self._num_categories, dtype=I64)[k]

    def _in_support(self, x):
        binary = (x == 0) | (x == 1)
        return binary & (np.sum(x, axis=-1, keepdims=True) == 1)

    def _log_prob(self, x):
        picked = np.where(x == 1, self._log_probs, 0.0)
        lp = np.sum(picked, axis=-1)
        return np.where(np.all(self._in_support(x), axis=-1), lp, -np.inf)

    def _mean(self):
        return self._probs

    def _variance(self):
        return self._probs * (1.0 - self._probs)

    def _covariance(self):
        p = self._probs
        return np.einsum('...i,ij->...ij', p, np.eye(self._num_categories)) - p[..., :, None] * p[..., None, :]

    def _mode(self):
        return np.eye(self._num_categories)[np.argmax(self._probs, axis=-1)]


class Poisson(Distribution):
    """Poisson over the non-negative integers with ``rate`` or ``log_rate``."""
    _param_event_ranks = {'rate': 0, 'log_rate': 0}
    _integer_support = True

    def __init__(self, rate=None, log_rate=None, validate_args=False, allow_nan_stats=True,
                 dtype=None, name='Poisson'):
        given = check_exclusive({'rate': rate, 'log_rate': log_rate}, 'rate', 'log_rate')
        params, dtype = convert_params({'rate': rate, 'log_rate': log_rate}, dtype)
        if given == 'rate':
            check_positive('rate', params['rate'], validate_args)
            self._rate = params['rate']
            with np.errstate(divide='ignore'):
                self._log_rate = np.log(self._rate)
        else:
            self._log_rate = params['log_rate']
            self._rate = np.exp(self._log_rate)
        super().__init__(
            dtype=dtype, reparameterization_type=NOT_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters=params, name=name,
        )

    @property
    def rate(self):
        return self._rate

    @property
    def log_rate(self):
        return self._log_rate

    def _sample(self, sample_shape, rng):
        rate = np.broadcast_to(self._rate, self.batch_shape)
        return rng_lib.standard_poisson(rng, rate, noise_shape(self, sample_shape),
                                        validate_args=self.validate_args)

    def _in_support(self, x):
        return (x >= 0) & _is_integer(x)

    def _log_prob(self, x):
        safe = np.where(self._in_support(x), x, 0.0)
        lp = sp.xlogy(safe, self._rate) - self._rate - lgamma(safe + 1.0)
        return np.where(self._in_support(x), lp, -np.inf)

    def _cdf(self, x):
        k = np.floor(np.maximum(x, 0.0))
        return np.where(x < 0, 0.0, sp.gammaincc(k + 1.0, self._rate))

    def _mean(self):
        return self._rate

    def _variance(self):
        return self._rate

    def _mode(self):
        return np.floor(self._rate)
