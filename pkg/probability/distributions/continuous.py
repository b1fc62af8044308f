"""
Scalar continuous families.
"""
import numpy as np
from scipy import special as sp

from .. import rng as rng_lib
from ..exceptions import InvalidParameter
from ..numcore import digamma, erfc, lbeta, lgamma, reg_inc_beta, reg_inc_gamma
from .base import (
    FULLY_REPARAMETERIZED, NOT_REPARAMETERIZED, Distribution, check_exclusive,
    check_positive, convert_params, noise_shape,
)

_HALF_LOG_TWO_PI = 0.5 * np.log(2.0 * np.pi)


class Normal(Distribution):
    """Normal with ``loc`` and ``scale``."""
    _param_event_ranks = {'loc': 0, 'scale': 0}

    def __init__(self, loc=0., scale=1., validate_args=False, allow_nan_stats=True,
                 dtype=None, name='Normal'):
        params, dtype = convert_params({'loc': loc, 'scale': scale}, dtype)
        check_positive('scale', params['scale'], validate_args)
        super().__init__(
            dtype=dtype, reparameterization_type=FULLY_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters=params, name=name,
        )

    @property
    def loc(self):
        return self._parameters['loc']

    @property
    def scale(self):
        return self._parameters['scale']

    def _sample_noise(self, sample_shape, rng):
        return rng_lib.standard_normal(rng, noise_shape(self, sample_shape), self._float_dtype)

    def _transform_noise(self, noise, params):
        return params['scale'] * noise + params['loc']

    def _z(self, x):
        return (x - self.loc) / self.scale

    def _log_prob(self, x):
        z = self._z(x)
        return -0.5 * np.square(z) - np.log(self.scale) - _HALF_LOG_TWO_PI

    def _cdf(self, x):
        return 0.5 * erfc(-self._z(x) / np.sqrt(2.0))

    def _log_cdf(self, x):
        return sp.log_ndtr(self._z(x))

    def _survival_function(self, x):
        return 0.5 * erfc(self._z(x) / np.sqrt(2.0))

    def _log_survival_function(self, x):
        return sp.log_ndtr(-self._z(x))

    def _quantile(self, p):
        return self.loc + self.scale * sp.ndtri(p)

    def _mean(self):
        return self.loc

    def _stddev(self):
        return self.scale

    def _variance(self):
        return np.square(self.scale)

    def _mode(self):
        return self.loc

    def _entropy(self):
        return 0.5 + _HALF_LOG_TWO_PI + np.log(self.scale) + np.zeros_like(self.loc)


class Laplace(Distribution):
    """Laplace with ``loc`` and ``scale``."""
    _param_event_ranks = {'loc': 0, 'scale': 0}

    def __init__(self, loc=0., scale=1., validate_args=False, allow_nan_stats=True,
                 dtype=None, name='Laplace'):
        params, dtype = convert_params({'loc': loc, 'scale': scale}, dtype)
        check_positive('scale', params['scale'], validate_args)
        super().__init__(
            dtype=dtype, reparameterization_type=FULLY_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters=params, name=name,
        )

    @property
    def loc(self):
        return self._parameters['loc']

    @property
    def scale(self):
        return self._parameters['scale']

    def _sample_noise(self, sample_shape, rng):
        return rng_lib.uniform(rng, noise_shape(self, sample_shape), self._float_dtype)

    def _transform_noise(self, noise, params):
        v = noise - 0.5
        return params['loc'] - params['scale'] * np.sign(v) * np.log1p(-2.0 * np.abs(v))

    def _log_prob(self, x):
        return -np.log(2.0 * self.scale) - np.abs(x - self.loc) / self.scale

    def _cdf(self, x):
        z = (x - self.loc) / self.scale
        return np.where(z < 0, 0.5 * np.exp(np.minimum(z, 0)), 1.0 - 0.5 * np.exp(-np.maximum(z, 0)))

    def _survival_function(self, x):
        z = (x - self.loc) / self.scale
        return np.where(z < 0, 1.0 - 0.5 * np.exp(np.minimum(z, 0)), 0.5 * np.exp(-np.maximum(z, 0)))

    def _quantile(self, p):
        lower = self.loc + self.scale * np.log(2.0 * p)
        upper = self.loc - self.scale * np.log(2.0 - 2.0 * p)
        return np.where(p < 0.5, lower, upper)

    def _mean(self):
        return self.loc

    def _variance(self):
        return 2.0 * np.square(self.scale)

    def _mode(self):
        return self.loc

    def _entropy(self):
        return 1.0 + np.log(2.0 * self.scale) + np.zeros_like(self.loc)


class Cauchy(Distribution):
    """Cauchy with ``loc`` and ``scale``; mean and variance are undefined."""
    _param_event_ranks = {'loc': 0, 'scale': 0}

    def __init__(self, loc=0., scale=1., validate_args=False, allow_nan_stats=True,
                 dtype=None, name='Cauchy'):
        params, dtype = convert_params({'loc': loc, 'scale': scale}, dtype)
        check_positive('scale', params['scale'], validate_args)
        super().__init__(
            dtype=dtype, reparameterization_type=FULLY_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters=params, name=name,
        )

    @property
    def loc(self):
        return self._parameters['loc']

    @property
    def scale(self):
        return self._parameters['scale']

    def _sample_noise(self, sample_shape, rng):
        return rng_lib.uniform(rng, noise_shape(self, sample_shape), self._float_dtype)

    def _transform_noise(self, noise, params):
        return params['loc'] + params['scale'] * np.tan(np.pi * (noise - 0.5))

    def _log_prob(self, x):
        z = (x - self.loc) / self.scale
        return -np.log(np.pi * self.scale) - np.log1p(np.square(z))

    def _cdf(self, x):
        return 0.5 + np.arctan((x - self.loc) / self.scale) / np.pi

    def _quantile(self, p):
        return self.loc + self.scale * np.tan(np.pi * (p - 0.5))

    def _mean(self):
        return np.full(np.broadcast(self.loc, self.scale).shape, np.nan)

    def _variance(self):
        return np.full(np.broadcast(self.loc, self.scale).shape, np.nan)

    def _mode(self):
        return self.loc

    def _entropy(self):
        return np.log(4.0 * np.pi * self.scale) + np.zeros_like(self.loc)


class Uniform(Distribution):
    """Uniform on [low, high)."""
    _param_event_ranks = {'low': 0, 'high': 0}

    def __init__(self, low=0., high=1., validate_args=False, allow_nan_stats=True,
                 dtype=None, name='Uniform'):
        params, dtype = convert_params({'low': low, 'high': high}, dtype)
        if validate_args and np.any(~(params['low'] < params['high'])):
            raise InvalidParameter('low must be less than high')
        super().__init__(
            dtype=dtype, reparameterization_type=FULLY_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters=params, name=name,
        )

    @property
    def low(self):
        return self._parameters['low']

    @property
    def high(self):
        return self._parameters['high']

    def _width(self):
        return self.high - self.low

    def _sample_noise(self, sample_shape, rng):
        return rng_lib.uniform(rng, noise_shape(self, sample_shape), self._float_dtype)

    def _transform_noise(self, noise, params):
        return params['low'] + (params['high'] - params['low']) * noise

    def _in_support(self, x):
        return (x >= self.low) & (x < self.high)

    def _log_prob(self, x):
        return np.where(self._in_support(x), -np.log(self._width()), -np.inf)

    def _cdf(self, x):
        return np.clip((x - self.low) / self._width(), 0.0, 1.0)

    def _quantile(self, p):
        return self.low + p * self._width()

    def _mean(self):
        return 0.5 * (self.low + self.high)

    def _variance(self):
        return np.square(self._width()) / 12.0

    def _entropy(self):
        return np.log(self._width())


class Exponential(Distribution):
    """Exponential with ``rate``."""
    _param_event_ranks = {'rate': 0}

    def __init__(self, rate=1., validate_args=False, allow_nan_stats=True,
                 dtype=None, name='Exponential'):
        params, dtype = convert_params({'rate': rate}, dtype)
        check_positive('rate', params['rate'], validate_args)
        super().__init__(
            dtype=dtype, reparameterization_type=FULLY_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters=params, name=name,
        )

    @property
    def rate(self):
        return self._parameters['rate']

    def _sample_noise(self, sample_shape, rng):
        return rng_lib.uniform(rng, noise_shape(self, sample_shape), self._float_dtype)

    def _transform_noise(self, noise, params):
        return -np.log(noise) / params['rate']

    def _in_support(self, x):
        return x >= 0

    def _log_prob(self, x):
        return np.where(x >= 0, np.log(self.rate) - self.rate * x, -np.inf)

    def _cdf(self, x):
        return np.where(x >= 0, -np.expm1(-self.rate * np.maximum(x, 0)), 0.0)

    def _survival_function(self, x):
        return np.where(x >= 0, np.exp(-self.rate * np.maximum(x, 0)), 1.0)

    def _log_survival_function(self, x):
        return np.where(x >= 0, -self.rate * x, 0.0)

    def _quantile(self, p):
        return -np.log1p(-p) / self.rate

    def _mean(self):
        return 1.0 / self.rate

    def _variance(self):
        return 1.0 / np.square(self.rate)

    def _mode(self):
        return np.zeros_like(self.rate)

    def _entropy(self):
        return 1.0 - np.log(self.rate)


class Gamma(Distribution):
    """Gamma with ``concentration`` and ``rate`` (or ``log_rate``)."""
    _param_event_ranks = {'concentration': 0, 'rate': 0, 'log_rate': 0}

    def __init__(self, concentration, rate=None, log_rate=None, validate_args=False,
                 allow_nan_stats=True, dtype=None, name='Gamma'):
        check_exclusive({'rate': rate, 'log_rate': log_rate}, 'rate', 'log_rate')
        params, dtype = convert_params(
            {'concentration': concentration, 'rate': rate, 'log_rate': log_rate}, dtype)
        check_positive('concentration', params['concentration'], validate_args)
        if 'rate' in params:
            check_positive('rate', params['rate'], validate_args)
            self._rate = params['rate']
        else:
            self._rate = np.exp(params['log_rate'])
        super().__init__(
            dtype=dtype, reparameterization_type=NOT_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters=params, name=name,
        )

    @property
    def concentration(self):
        return self._parameters['concentration']

    @property
    def rate(self):
        return self._rate

    def _sample(self, sample_shape, rng):
        shape = noise_shape(self, sample_shape)
        alpha = np.broadcast_to(self.concentration, self.batch_shape)
        draws = rng_lib.standard_gamma(rng, alpha, shape, validate_args=self.validate_args)
        return draws / self.rate

    def _in_support(self, x):
        return x >= 0

    def _log_prob(self, x):
        alpha, rate = self.concentration, self.rate
        lp = sp.xlogy(alpha, rate) + sp.xlogy(alpha - 1.0, x) - rate * x - lgamma(alpha)
        return np.where(x >= 0, lp, -np.inf)

    def _cdf(self, x):
        return reg_inc_gamma(self.concentration + np.zeros_like(x), self.rate * np.maximum(x, 0))

    def _survival_function(self, x):
        return sp.gammaincc(self.concentration, self.rate * np.maximum(x, 0))

    def _quantile(self, p):
        return sp.gammaincinv(self.concentration, p) / self.rate

    def _mean(self):
        return self.concentration / self.rate

    def _variance(self):
        return self.concentration / np.square(self.rate)

    def _mode(self):
        alpha = self.concentration
        return np.where(alpha >= 1, (alpha - 1.0) / self.rate, np.nan)

    def _entropy(self):
        alpha = self.concentration
        return alpha - np.log(self.rate) + lgamma(alpha) + (1.0 - alpha) * digamma(alpha)


class Beta(Distribution):
    """Beta with ``concentration1`` (alpha) and ``concentration0`` (beta)."""
    _param_event_ranks = {'concentration1': 0, 'concentration0': 0}

    def __init__(self, concentration1, concentration0, validate_args=False,
                 allow_nan_stats=True, dtype=None, name='Beta'):
        params, dtype = convert_params(
            {'concentration1': concentration1, 'concentration0': concentration0}, dtype)
        check_positive('concentration1', params['concentration1'], validate_args)
        check_positive('concentration0', params['concentration0'], validate_args)
        super().__init__(
            dtype=dtype, reparameterization_type=NOT_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters=params, name=name,
        )

    @property
    def concentration1(self):
        return self._parameters['concentration1']

    @property
    def concentration0(self):
        return self._parameters['concentration0']

    def _total(self):
        return self.concentration1 + self.concentration0

    def _sample(self, sample_shape, rng):
        shape = noise_shape(self, sample_shape)
        rng1, rng0 = rng.split(2)
        g1 = rng_lib.standard_gamma(rng1, np.broadcast_to(self.concentration1, self.batch_shape), shape)
        g0 = rng_lib.standard_gamma(rng0, np.broadcast_to(self.concentration0, self.batch_shape), shape)
        return g1 / (g1 + g0)

    def _in_support(self, x):
        return (x >= 0) & (x <= 1)

    def _log_prob(self, x):
        a, b = self.concentration1, self.concentration0
        lp = sp.xlogy(a - 1.0, x) + sp.xlog1py(b - 1.0, -x) - lbeta(a, b)
        return np.where(self._in_support(x), lp, -np.inf)

    def _cdf(self, x):
        a = self.concentration1 + np.zeros_like(x)
        b = self.concentration0 + np.zeros_like(x)
        return reg_inc_beta(a, b, np.clip(x, 0.0, 1.0))

    def _quantile(self, p):
        return sp.betaincinv(self.concentration1, self.concentration0, p)

    def _mean(self):
        return self.concentration1 / self._total()

    def _variance(self):
        total = self._total()
        return self.concentration1 * self.concentration0 / (np.square(total) * (total + 1.0))

    def _mode(self):
        a, b = self.concentration1, self.concentration0
        return np.where((a > 1) & (b > 1), (a - 1.0) / (a + b - 2.0), np.nan)

    def _entropy(self):
        a, b = self.concentration1, self.concentration0
        total = self._total()
        return (lbeta(a, b) - (a - 1.0) * digamma(a) - (b - 1.0) * digamma(b)
                + (total - 2.0) * digamma(total))


class StudentT(Distribution):
    """Student's t with ``df``, ``loc`` and ``scale``."""
    _param_event_ranks = {'df': 0, 'loc': 0, 'scale': 0}

    def __init__(self, df, loc=0., scale=1., validate_args=False, allow_nan_stats=True,
                 dtype=None, name='StudentT'):
        params, dtype = convert_params({'df': df, 'loc': loc, 'scale': scale}, dtype)
        check_positive('df', params['df'], validate_args)
        check_positive('scale', params['scale'], validate_args)
        super().__init__(
            dtype=dtype, reparameterization_type=NOT_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters=params, name=name,
        )

    @property
    def df(self):
        return self._parameters['df']

    @property
    def loc(self):
        return self._parameters['loc']

    @property
    def scale(self):
        return self._parameters['scale']

    def _sample(self, sample_shape, rng):
        shape = noise_shape(self, sample_shape)
        normal_rng, gamma_rng = rng.split(2)
        z = rng_lib.standard_normal(normal_rng, shape, self._float_dtype)
        half_df = np.broadcast_to(0.5 * self.df, self.batch_shape)
        g = rng_lib.standard_gamma(gamma_rng, half_df, shape) / (0.5 * self.df)
        return self.loc + self.scale * z / np.sqrt(g)

    def _log_prob(self, x):
        df = self.df
        z = (x - self.loc) / self.scale
        return (lgamma(0.5 * (df + 1.0)) - lgamma(0.5 * df) - 0.5 * np.log(df * np.pi)
                - np.log(self.scale) - 0.5 * (df + 1.0) * np.log1p(np.square(z) / df))

    def _cdf(self, x):
        df = self.df + np.zeros_like(x)
        t = (x - self.loc) / self.scale
        tail = 0.5 * reg_inc_beta(0.5 * df, np.full_like(df, 0.5), df / (df + np.square(t)))
        return np.where(t < 0, tail, 1.0 - tail)

    def _quantile(self, p):
        return self.loc + self.scale * sp.stdtrit(self.df, p)

    def _mean(self):
        return np.where(self.df > 1, self.loc, np.nan)

    def _variance(self):
        df = self.df
        safe = np.where(df > 2, df, 3.0)
        return np.where(df > 2, np.square(self.scale) * safe / (safe - 2.0), np.nan)

    def _mode(self):
        return self.loc + np.zeros_like(self.df)

    def _entropy(self):
        df = self.df
        half = 0.5 * (df + 1.0)
        return (half * (digamma(half) - digamma(0.5 * df)) + 0.5 * np.log(df)
                + lbeta(0.5 * df, 0.5) + np.log(self.scale) + np.zeros_like(self.loc))
