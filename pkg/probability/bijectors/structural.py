"""
Bijectors that rearrange or reshape events: Permute, Reshape, SoftmaxCentered.
"""
import numpy as np

from ..exceptions import DomainError, InvalidParameter, ShapeError
from ..numcore import as_shape, log_softmax, prod
from .base import Bijector


class Permute(Bijector):
    """Reorders the rightmost axis: ``y[..., i] = x[..., permutation[i]]``."""

    def __init__(self, permutation, validate_args=False, name='Permute'):
        permutation = np.asarray(permutation, dtype=np.int64)
        if permutation.ndim != 1 or not np.array_equal(np.sort(permutation), np.arange(permutation.size)):
            raise InvalidParameter(f'permutation must be a permutation of 0..n-1, got {permutation.tolist()}')
        self._permutation = permutation
        self._inverse_permutation = np.argsort(permutation)
        super().__init__(forward_min_event_ndims=1, is_constant_jacobian=True,
                         validate_args=validate_args, name=name)

    @property
    def permutation(self):
        return self._permutation

    def _check(self, shape):
        if not shape or shape[-1] != self._permutation.size:
            raise ShapeError(f'{self.name} acts on events of size {self._permutation.size}, got {list(shape)}')
        return shape

    def _forward(self, x):
        self._check(x.shape)
        return x[..., self._permutation]

    def _inverse(self, y):
        self._check(y.shape)
        return y[..., self._inverse_permutation]

    def _forward_log_det_jacobian(self, x):
        return np.zeros((), dtype=x.dtype)

    def _forward_event_shape(self, shape):
        return self._check(shape)

    def _inverse_event_shape(self, shape):
        return self._check(shape)


class Reshape(Bijector):
    """Reshapes the event from ``event_shape_in`` to ``event_shape_out``."""

    def __init__(self, event_shape_out, event_shape_in, validate_args=False, name='Reshape'):
        self._shape_out = as_shape(event_shape_out)
        self._shape_in = as_shape(event_shape_in)
        if prod(self._shape_out) != prod(self._shape_in):
            raise ShapeError(f'Cannot reshape event {list(self._shape_in)} into {list(self._shape_out)}')
        super().__init__(forward_min_event_ndims=len(self._shape_in),
                         inverse_min_event_ndims=len(self._shape_out),
                         is_constant_jacobian=True, validate_args=validate_args, name=name)

    @property
    def event_shape_in(self):
        return self._shape_in

    @property
    def event_shape_out(self):
        return self._shape_out

    @staticmethod
    def _swap(value, source, target):
        rank = len(source)
        if value.shape[value.ndim - rank:] != source:
            raise ShapeError(f'Expected trailing shape {list(source)}, got {list(value.shape)}')
        return value.reshape(value.shape[:value.ndim - rank] + target)

    def _forward(self, x):
        return self._swap(x, self._shape_in, self._shape_out)

    def _inverse(self, y):
        return self._swap(y, self._shape_out, self._shape_in)

    def _forward_log_det_jacobian(self, x):
        return np.zeros((), dtype=x.dtype)

    def _forward_event_shape(self, shape):
        if shape != self._shape_in:
            raise ShapeError(f'{self.name} expects event shape {list(self._shape_in)}, got {list(shape)}')
        return self._shape_out

    def _inverse_event_shape(self, shape):
        if shape != self._shape_out:
            raise ShapeError(f'{self.name} expects event shape {list(self._shape_out)}, got {list(shape)}')
        return self._shape_in


class SoftmaxCentered(Bijector):
    """
    Maps R^k onto the interior of the k-simplex in R^(k+1) by appending a
    zero and taking the softmax. The jacobian is taken over the first k
    output coordinates, which determine the last.
    """

    def __init__(self, validate_args=False, name='SoftmaxCentered'):
        super().__init__(forward_min_event_ndims=1, validate_args=validate_args, name=name)

    @staticmethod
    def _pad(x):
        return np.concatenate([x, np.zeros(x.shape[:-1] + (1,), dtype=x.dtype)], axis=-1)

    def _forward(self, x):
        return np.exp(log_softmax(self._pad(x)))

    def _inverse(self, y):
        log_y = np.log(y)
        return log_y[..., :-1] - log_y[..., -1:]

    def _forward_log_det_jacobian(self, x):
        # det of the k x k block is the product of all k + 1 outputs
        return np.sum(log_softmax(self._pad(x)), axis=-1)

    def _inverse_log_det_jacobian(self, y):
        return -np.sum(np.log(y), axis=-1)

    def _check_inverse_range(self, y):
        if np.any(y <= 0) or not np.allclose(np.sum(y, axis=-1), 1.0):
            raise DomainError(f'{self.name}.inverse requires points on the simplex')

    def _forward_event_shape(self, shape):
        if len(shape) != 1:
            raise ShapeError(f'{self.name} needs a rank-1 event, got {list(shape)}')
        return (shape[0] + 1,)

    def _inverse_event_shape(self, shape):
        if len(shape) != 1 or shape[0] < 2:
            raise ShapeError(f'{self.name} needs a rank-1 event of size >= 2, got {list(shape)}')
        return (shape[0] - 1,)
