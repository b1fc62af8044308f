"""
The Distribution interface.

Public methods validate shapes and arguments, then call the private
``_method`` each family implements. Batch and event shapes are fixed at
construction; every method is a pure function of the instance, its inputs
and an explicit ``RngState``.
"""
import dataclasses
import enum
from typing import Dict, Tuple

import numpy as np

from ..exceptions import (
    DomainError, IncompatibleShapes, InvalidParameter, NaNError,
    NotReparameterized, ShapeError,
)
from ..numcore import (
    F32, F64, I64, Shape, as_ndvalue, as_shape, broadcast_all,
    broadcast_shapes, freeze, resolve_dtype,
)


class ReparameterizationType(enum.Enum):
    FULLY_REPARAMETERIZED = 'FULLY_REPARAMETERIZED'
    NOT_REPARAMETERIZED = 'NOT_REPARAMETERIZED'


FULLY_REPARAMETERIZED = ReparameterizationType.FULLY_REPARAMETERIZED
NOT_REPARAMETERIZED = ReparameterizationType.NOT_REPARAMETERIZED

# Largest integers exactly representable by each floating dtype.
_INTEGER_LIMITS = {F32: 2 ** 24, F64: 2 ** 53}


@dataclasses.dataclass(frozen=True)
class ShapeTriple:
    """The (sample, batch, event) partition of an outcome's shape."""
    sample: Shape
    batch: Shape
    event: Shape

    @property
    def shape(self) -> Shape:
        return self.sample + self.batch + self.event

    @classmethod
    def partition(cls, shape, batch_shape, event_shape) -> 'ShapeTriple':
        """Split ``shape`` given known batch and event shapes."""
        shape = as_shape(shape)
        tail = len(batch_shape) + len(event_shape)
        if len(shape) < tail or shape[len(shape) - tail:] != tuple(batch_shape) + tuple(event_shape):
            raise ShapeError(
                f'Shape {shape} does not end with batch {batch_shape} + event {event_shape}'
            )
        return cls(shape[:len(shape) - tail], tuple(batch_shape), tuple(event_shape))


def convert_params(params: Dict[str, object], dtype=None) -> Tuple[Dict[str, np.ndarray], np.dtype]:
    """Convert the non-None entries of ``params`` to frozen arrays of one floating dtype."""
    present = {k: v for k, v in params.items() if v is not None}
    dtype = resolve_dtype(*present.values(), dtype=dtype)
    converted = {}
    for key, value in present.items():
        try:
            converted[key] = freeze(np.array(value, dtype=dtype))
        except (TypeError, ValueError) as exc:
            raise InvalidParameter(f'{key} is not a rectangular array of numbers: {exc}') from exc
    return converted, dtype


def check_exclusive(params: Dict[str, object], first: str, second: str) -> str:
    """Exactly one of ``first``/``second`` must be set; return the one that is."""
    has_first = params.get(first) is not None
    has_second = params.get(second) is not None
    if has_first and has_second:
        raise InvalidParameter(f'Must specify exactly one of {first} or {second}, not both')
    if not (has_first or has_second):
        raise InvalidParameter(f'Must specify one of {first} or {second}')
    return first if has_first else second


def infer_batch_shape(params: Dict[str, np.ndarray], event_ranks: Dict[str, int]) -> Shape:
    """Broadcast parameter shapes after stripping each one's per-instance event rank."""
    shapes = []
    for key, value in params.items():
        rank = event_ranks.get(key, 0)
        if value.ndim < rank:
            raise InvalidParameter(f'Parameter {key} needs rank >= {rank}, got shape {value.shape}')
        shapes.append(value.shape[:value.ndim - rank])
    try:
        return broadcast_all(shapes)
    except IncompatibleShapes as exc:
        raise InvalidParameter(f'Parameter shapes are not broadcast-compatible: {exc}') from exc


class Distribution:
    """
    Base class for probability distributions.

    Subclasses implement ``_sample`` and ``_log_prob`` and any analytic
    statistic they have (``_mean``, ``_variance``, ``_entropy``, ``_cdf``,
    ``_quantile`` ...). Missing statistics raise NotImplementedError; they
    are never estimated by sampling.
    """
    # parameter name -> number of rightmost dims consumed by one instance
    _param_event_ranks: Dict[str, int] = {}
    _integer_support = False

    def __init__(self, *, dtype, reparameterization_type, validate_args=False,
                 allow_nan_stats=True, parameters=None, name=None,
                 batch_shape=None, event_shape=()):
        self._parameters = dict(parameters or {})
        self._float_dtype = np.dtype(dtype)
        self._dtype = I64 if self._integer_support else self._float_dtype
        self._reparameterization_type = reparameterization_type
        self._validate_args = bool(validate_args)
        self._allow_nan_stats = bool(allow_nan_stats)
        self._name = name or type(self).__name__
        if batch_shape is None:
            arrays = {k: v for k, v in self._parameters.items() if isinstance(v, np.ndarray)}
            batch_shape = infer_batch_shape(arrays, self._param_event_ranks)
        self._batch_shape = as_shape(batch_shape)
        self._event_shape = as_shape(event_shape)

    # Properties fixed for the instance lifetime.

    @property
    def name(self) -> str:
        return self._name

    @property
    def dtype(self) -> np.dtype:
        return self._dtype

    @property
    def parameters(self) -> Dict[str, object]:
        return dict(self._parameters)

    @property
    def reparameterization_type(self) -> ReparameterizationType:
        return self._reparameterization_type

    @property
    def validate_args(self) -> bool:
        return self._validate_args

    @property
    def allow_nan_stats(self) -> bool:
        return self._allow_nan_stats

    @property
    def batch_shape(self) -> Shape:
        return self._batch_shape

    @property
    def event_shape(self) -> Shape:
        return self._event_shape

    def batch_shape_tensor(self) -> np.ndarray:
        return np.array(self._batch_shape, dtype=I64)

    def event_shape_tensor(self) -> np.ndarray:
        return np.array(self._event_shape, dtype=I64)

    def is_scalar_batch(self) -> bool:
        return self._batch_shape == ()

    def is_scalar_event(self) -> bool:
        return self._event_shape == ()

    def __repr__(self):
        return (f'<{self._name} batch_shape={list(self._batch_shape)} '
                f'event_shape={list(self._event_shape)} dtype={self._dtype}>')

    # Sampling.

    def sample(self, sample_shape=(), rng=None) -> np.ndarray:
        """Draw an outcome of shape sample_shape + batch_shape + event_shape."""
        if rng is None:
            raise TypeError(f'{self._name}.sample requires an explicit RngState')
        sample_shape = as_shape(sample_shape)
        value = self._sample(sample_shape, rng)
        if value.flags.writeable:
            value = freeze(value)
        return value

    def _sample(self, sample_shape: Shape, rng) -> np.ndarray:
        if self._reparameterization_type is FULLY_REPARAMETERIZED:
            noise = self._sample_noise(sample_shape, rng)
            return self._transform_noise(noise, self._parameters)
        raise NotImplementedError(f'{self._name} does not implement sampling')

    def sample_reparameterized_path(self, sample_shape=(), rng=None):
        """
        Return ``(noise, transform)`` where ``transform(params)`` maps the
        parameter-free noise to a sample; with no overrides it reproduces
        ``sample(sample_shape, rng)`` exactly.
        """
        if self._reparameterization_type is not FULLY_REPARAMETERIZED:
            raise NotReparameterized(f'{self._name} is not reparameterized')
        if rng is None:
            raise TypeError(f'{self._name}.sample_reparameterized_path requires an explicit RngState')
        noise = freeze(self._sample_noise(as_shape(sample_shape), rng))

        def transform(params=None):
            merged = dict(self._parameters)
            for key, value in (params or {}).items():
                if key not in merged:
                    raise InvalidParameter(f'{self._name} has no parameter {key!r}')
                merged[key] = as_ndvalue(value, self._float_dtype)
            return self._transform_noise(noise, merged)

        return noise, transform

    def _sample_noise(self, sample_shape: Shape, rng) -> np.ndarray:
        raise NotImplementedError

    def _transform_noise(self, noise: np.ndarray, params: Dict[str, np.ndarray]) -> np.ndarray:
        raise NotImplementedError

    # Densities.

    def _convert_value(self, value) -> np.ndarray:
        value = as_ndvalue(value, self._float_dtype)
        rank = len(self._event_shape)
        if value.ndim < rank or value.shape[value.ndim - rank:] != self._event_shape:
            raise ShapeError(
                f'{self._name} expects trailing event shape {list(self._event_shape)}, '
                f'got value of shape {list(value.shape)}'
            )
        try:
            broadcast_shapes(value.shape[:value.ndim - rank], self._batch_shape)
        except IncompatibleShapes as exc:
            raise ShapeError(f'{self._name}: {exc}') from exc
        return value

    def _validate_sample(self, value: np.ndarray) -> None:
        if self._integer_support:
            limit = _INTEGER_LIMITS[self._float_dtype]
            if np.any(np.floor(value) != value):
                raise DomainError(f'{self._name} has integer support; got non-integer values')
            if np.any(np.abs(value) > limit):
                raise DomainError(f'{self._name} values exceed the representable integer bound {limit}')
        if not np.all(self._in_support(value)):
            raise DomainError(f'{self._name} values lie outside the support')

    def _in_support(self, value: np.ndarray) -> np.ndarray:
        return np.ones(value.shape, dtype=bool)

    def _as_float(self, value) -> np.ndarray:
        return np.asarray(value, dtype=self._float_dtype)

    def log_prob(self, value) -> np.ndarray:
        """Natural log of the density (or mass) at ``value``."""
        value = self._convert_value(value)
        if self._validate_args:
            self._validate_sample(value)
        with np.errstate(divide='ignore', invalid='ignore'):
            return self._as_float(self._log_prob(value))

    def prob(self, value) -> np.ndarray:
        value = self._convert_value(value)
        if self._validate_args:
            self._validate_sample(value)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            try:
                return self._as_float(self._prob(value))
            except NotImplementedError:
                return self._as_float(np.exp(self._log_prob(value)))

    def _log_prob(self, value):
        raise NotImplementedError(f'{self._name} does not implement log_prob')

    def _prob(self, value):
        raise NotImplementedError

    # Cumulative functions; related forms are derived when a family has no
    # more stable implementation.

    def cdf(self, value) -> np.ndarray:
        value = self._convert_value(value)
        with np.errstate(divide='ignore', invalid='ignore'):
            return self._as_float(self._cdf(value))

    def log_cdf(self, value) -> np.ndarray:
        value = self._convert_value(value)
        with np.errstate(divide='ignore', invalid='ignore'):
            try:
                return self._as_float(self._log_cdf(value))
            except NotImplementedError:
                return self._as_float(np.log(self._cdf(value)))

    def survival_function(self, value) -> np.ndarray:
        value = self._convert_value(value)
        with np.errstate(divide='ignore', invalid='ignore'):
            try:
                return self._as_float(self._survival_function(value))
            except NotImplementedError:
                return self._as_float(1.0 - self._cdf(value))

    def log_survival_function(self, value) -> np.ndarray:
        value = self._convert_value(value)
        with np.errstate(divide='ignore', invalid='ignore'):
            try:
                return self._as_float(self._log_survival_function(value))
            except NotImplementedError:
                pass
            try:
                return self._as_float(np.log(self._survival_function(value)))
            except NotImplementedError:
                return self._as_float(np.log1p(-self._cdf(value)))

    def quantile(self, value) -> np.ndarray:
        value = as_ndvalue(value, self._float_dtype)
        if self._validate_args and np.any((value < 0) | (value > 1)):
            raise DomainError(f'{self._name}.quantile expects probabilities in [0, 1]')
        with np.errstate(divide='ignore', invalid='ignore'):
            return self._as_float(self._quantile(value))

    def _cdf(self, value):
        raise NotImplementedError(f'{self._name} does not implement cdf')

    def _log_cdf(self, value):
        raise NotImplementedError

    def _survival_function(self, value):
        raise NotImplementedError

    def _log_survival_function(self, value):
        raise NotImplementedError

    def _quantile(self, value):
        raise NotImplementedError(f'{self._name} does not implement quantile')

    # Statistics.

    def _statistic(self, value, what: str, event: bool = True) -> np.ndarray:
        shape = self._batch_shape + (self._event_shape if event else ())
        value = np.array(np.broadcast_to(np.asarray(value, dtype=self._float_dtype), shape))
        if not self._allow_nan_stats and np.any(np.isnan(value)):
            raise NaNError(f'{self._name}.{what} is undefined (NaN) and allow_nan_stats is False')
        return value

    def mean(self) -> np.ndarray:
        return self._statistic(self._mean(), 'mean')

    def variance(self) -> np.ndarray:
        try:
            value = self._variance()
        except NotImplementedError:
            value = np.square(self._stddev())
        return self._statistic(value, 'variance')

    def stddev(self) -> np.ndarray:
        try:
            value = self._stddev()
        except NotImplementedError:
            value = np.sqrt(self._variance())
        return self._statistic(value, 'stddev')

    def mode(self) -> np.ndarray:
        return self._statistic(self._mode(), 'mode')

    def entropy(self) -> np.ndarray:
        return self._statistic(self._entropy(), 'entropy', event=False)

    def covariance(self) -> np.ndarray:
        value = self._covariance()
        shape = self._batch_shape + self._event_shape + self._event_shape[-1:]
        return self._statistic_shaped(value, shape, 'covariance')

    def _statistic_shaped(self, value, shape, what):
        value = np.array(np.broadcast_to(np.asarray(value, dtype=self._float_dtype), shape))
        if not self._allow_nan_stats and np.any(np.isnan(value)):
            raise NaNError(f'{self._name}.{what} is undefined (NaN) and allow_nan_stats is False')
        return value

    def _mean(self):
        raise NotImplementedError(f'{self._name} does not implement mean')

    def _variance(self):
        raise NotImplementedError(f'{self._name} does not implement variance')

    def _stddev(self):
        raise NotImplementedError(f'{self._name} does not implement stddev')

    def _mode(self):
        raise NotImplementedError(f'{self._name} does not implement mode')

    def _entropy(self):
        raise NotImplementedError(f'{self._name} does not implement entropy')

    def _covariance(self):
        raise NotImplementedError(f'{self._name} does not implement covariance')

    # Functionals.

    def kl_divergence(self, other: 'Distribution') -> np.ndarray:
        from ..functionals import kl_divergence
        return kl_divergence(self, other)

    def cross_entropy(self, other: 'Distribution') -> np.ndarray:
        from ..functionals import cross_entropy
        return cross_entropy(self, other)


def check_positive(name: str, value: np.ndarray, validate_args: bool) -> None:
    if validate_args and np.any(~(value > 0)):
        raise InvalidParameter(f'{name} must be positive')


def noise_shape(dist: Distribution, sample_shape: Shape) -> Shape:
    return tuple(sample_shape) + dist.batch_shape + dist.event_shape

