"""
Vector-event families: Dirichlet and the affine-transformed multivariate normals.
"""
import numpy as np
from scipy import special as sp

from .. import rng as rng_lib
from ..bijectors import Affine
from ..exceptions import InvalidParameter, ShapeError
from ..numcore import digamma, lgamma, resolve_dtype
from .base import (
    FULLY_REPARAMETERIZED, NOT_REPARAMETERIZED, Distribution, check_positive,
    convert_params, infer_batch_shape, noise_shape,
)
from .continuous import Normal
from .meta import Independent
from .transformed import TransformedDistribution


class Dirichlet(Distribution):
    """Dirichlet over the (K-1)-simplex; event shape [K]."""
    _param_event_ranks = {'concentration': 1}

    def __init__(self, concentration, validate_args=False, allow_nan_stats=True,
                 dtype=None, name='Dirichlet'):
        params, dtype = convert_params({'concentration': concentration}, dtype)
        alpha = params['concentration']
        if alpha.ndim < 1:
            raise InvalidParameter('concentration must have a trailing category axis')
        check_positive('concentration', alpha, validate_args)
        super().__init__(
            dtype=dtype, reparameterization_type=NOT_REPARAMETERIZED,
            validate_args=validate_args, allow_nan_stats=allow_nan_stats,
            parameters=params, name=name, event_shape=alpha.shape[-1:],
        )

    @property
    def concentration(self):
        return self._parameters['concentration']

    def _total(self):
        return np.sum(self.concentration, axis=-1, keepdims=True)

    def _sample(self, sample_shape, rng):
        shape = noise_shape(self, sample_shape)
        alpha = np.broadcast_to(self.concentration, self.batch_shape + self.event_shape)
        gammas = rng_lib.standard_gamma(rng, alpha, shape)
        return gammas / np.sum(gammas, axis=-1, keepdims=True)

    def _in_support(self, x):
        on_simplex = np.isclose(np.sum(x, axis=-1, keepdims=True), 1.0, rtol=0, atol=1e-6)
        return (x >= 0) & on_simplex

    def _log_normalizer(self):
        alpha = self.concentration
        return np.sum(lgamma(alpha), axis=-1) - lgamma(np.sum(alpha, axis=-1))

    def _log_prob(self, x):
        alpha = self.concentration
        lp = np.sum(sp.xlogy(alpha - 1.0, x), axis=-1) - self._log_normalizer()
        return np.where(np.all(self._in_support(x), axis=-1), lp, -np.inf)

    def _mean(self):
        return self.concentration / self._total()

    def _variance(self):
        alpha, total = self.concentration, self._total()
        return alpha * (total - alpha) / (np.square(total) * (total + 1.0))

    def _covariance(self):
        alpha, total = self.concentration, self._total()
        mean = alpha / total
        scale = 1.0 / (total[..., None] + 1.0)
        diag = mean[..., :, None] * np.eye(alpha.shape[-1])
        return scale * (diag - mean[..., :, None] * mean[..., None, :])

    def _mode(self):
        alpha, total = self.concentration, self._total()
        k = alpha.shape[-1]
        mode = (alpha - 1.0) / (total - k)
        return np.where(np.all(alpha > 1, axis=-1, keepdims=True), mode, np.nan)

    def _entropy(self):
        alpha = self.concentration
        total = np.sum(alpha, axis=-1)
        k = alpha.shape[-1]
        return (self._log_normalizer() + (total - k) * digamma(total)
                - np.sum((alpha - 1.0) * digamma(alpha), axis=-1))


class _AffineNormal(TransformedDistribution):
    """Standard normal vector pushed through an Affine; shared by the MVN families."""
    _param_event_ranks = {'loc': 1, 'scale_diag': 1, 'scale_tril': 2}

    def __init__(self, params, dtype, scale_key, validate_args, allow_nan_stats, name):
        scale = params[scale_key]
        d = scale.shape[-1]
        loc = params.get('loc')
        if loc is not None and loc.shape[-1:] != (d,):
            raise ShapeError(f'loc has event size {loc.shape[-1:]}, scale has {d}')
        batch = infer_batch_shape(params, self._param_event_ranks)
        base = Independent(
            Normal(np.zeros(batch + (d,), dtype=dtype), np.ones((), dtype=dtype),
                   allow_nan_stats=allow_nan_stats),
            reinterpreted_batch_ndims=1,
        )
        bijector = Affine(shift=loc, validate_args=validate_args, dtype=dtype, **{scale_key: scale})
        self._mvn_params = params
        super().__init__(base, bijector, validate_args=validate_args, name=name)
        self._parameters = dict(params)
        self._reparameterization_type = FULLY_REPARAMETERIZED

    @property
    def loc(self):
        loc = self._mvn_params.get('loc')
        if loc is None:
            return np.zeros(self.event_shape, dtype=self._float_dtype)
        return loc

    def _scale_matrix(self, params):
        raise NotImplementedError

    def _transform_noise(self, noise, params):
        y = np.einsum('...ij,...j->...i', self._scale_matrix(params), noise)
        if params.get('loc') is not None:
            y = y + params['loc']
        return y

    def _mean(self):
        return self.loc

    def _mode(self):
        return self.loc

    def _covariance(self):
        scale = self._scale_matrix(self._parameters)
        return np.einsum('...ij,...kj->...ik', scale, scale)

    def _variance(self):
        return np.diagonal(self._covariance(), axis1=-2, axis2=-1)


class MultivariateNormalDiag(_AffineNormal):
    """MVN with covariance diag(scale_diag) ** 2."""

    def __init__(self, loc=None, scale_diag=None, validate_args=False, allow_nan_stats=True,
                 dtype=None, name='MultivariateNormalDiag'):
        if scale_diag is None:
            if loc is None:
                raise InvalidParameter('MultivariateNormalDiag needs loc or scale_diag')
            dtype = resolve_dtype(loc, dtype=dtype)
            scale_diag = np.ones(np.shape(loc)[-1:], dtype=dtype)
        params, dtype = convert_params({'loc': loc, 'scale_diag': scale_diag}, dtype)
        if params['scale_diag'].ndim < 1:
            raise ShapeError('scale_diag must have rank >= 1')
        check_positive('scale_diag', params['scale_diag'], validate_args)
        super().__init__(params, dtype, 'scale_diag', validate_args, allow_nan_stats, name)

    @property
    def scale_diag(self):
        return self._parameters['scale_diag']

    def _scale_matrix(self, params):
        diag = params['scale_diag']
        return diag[..., :, None] * np.eye(diag.shape[-1], dtype=diag.dtype)

    def _transform_noise(self, noise, params):
        y = params['scale_diag'] * noise
        if params.get('loc') is not None:
            y = y + params['loc']
        return y

    def _variance(self):
        return np.square(self.scale_diag)


class MultivariateNormalTriL(_AffineNormal):
    """MVN with covariance scale_tril @ scale_tril.T."""

    def __init__(self, loc=None, scale_tril=None, validate_args=False, allow_nan_stats=True,
                 dtype=None, name='MultivariateNormalTriL'):
        if scale_tril is None:
            raise InvalidParameter('MultivariateNormalTriL needs scale_tril')
        params, dtype = convert_params({'loc': loc, 'scale_tril': scale_tril}, dtype)
        tril = params['scale_tril']
        if tril.ndim < 2 or tril.shape[-1] != tril.shape[-2]:
            raise InvalidParameter(f'scale_tril must be square, got shape {list(tril.shape)}')
        if validate_args:
            if np.any(np.triu(tril, 1) != 0):
                raise InvalidParameter('scale_tril must be lower-triangular')
            if np.any(np.diagonal(tril, axis1=-2, axis2=-1) == 0):
                raise InvalidParameter('scale_tril must have a nonzero diagonal')
        super().__init__(params, dtype, 'scale_tril', validate_args, allow_nan_stats, name)

    @property
    def scale_tril(self):
        return self._parameters['scale_tril']

    def _scale_matrix(self, params):
        return np.tril(params['scale_tril'])
