"""
Masked autoregressive bijector and the linear reference shift/log-scale function.
"""
from typing import Callable, Tuple

import numpy as np

from .. import rng as rng_lib
from ..exceptions import DependenceViolation, ShapeError
from ..numcore import freeze, resolve_dtype
from .base import Bijector

ShiftAndLogScaleFn = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


class LinearAutoregressiveFn:
    """
    x -> (shift, log_scale) through strictly lower-triangular linear maps.

    Output i only sees x[:i]. Log-scales are squashed to (-clamp, clamp)
    with a scaled tanh.
    """

    def __init__(self, shift_weights, log_scale_weights, shift_bias=None, log_scale_bias=None,
                 clamp: float = 5.0, dtype=None):
        dtype = resolve_dtype(shift_weights, log_scale_weights, dtype=dtype)
        self.shift_weights = freeze(np.tril(np.array(shift_weights, dtype=dtype), -1))
        self.log_scale_weights = freeze(np.tril(np.array(log_scale_weights, dtype=dtype), -1))
        d = self.shift_weights.shape[-1]
        if self.shift_weights.shape != (d, d) or self.log_scale_weights.shape != (d, d):
            raise ShapeError('Autoregressive weights must be square matrices of equal size')
        self.shift_bias = freeze(np.zeros(d, dtype=dtype) if shift_bias is None
                                 else np.array(shift_bias, dtype=dtype))
        self.log_scale_bias = freeze(np.zeros(d, dtype=dtype) if log_scale_bias is None
                                     else np.array(log_scale_bias, dtype=dtype))
        self.clamp = float(clamp)
        self.event_size = d

    @classmethod
    def random(cls, event_size: int, rng, weight_scale: float = 0.5, dtype=None):
        """Random weights drawn from ``rng``; deterministic per state."""
        shift_rng, scale_rng, bias_rng = rng.split(3)
        shape = (event_size, event_size)
        dtype = resolve_dtype(dtype=dtype)
        return cls(
            weight_scale * rng_lib.standard_normal(shift_rng, shape, dtype),
            weight_scale * rng_lib.standard_normal(scale_rng, shape, dtype),
            shift_bias=weight_scale * rng_lib.standard_normal(bias_rng, (event_size,), dtype),
            dtype=dtype,
        )

    def __call__(self, x):
        shift = np.einsum('ij,...j->...i', self.shift_weights, x) + self.shift_bias
        raw = np.einsum('ij,...j->...i', self.log_scale_weights, x) + self.log_scale_bias
        return shift, self.clamp * np.tanh(raw / self.clamp)


class MaskedAutoregressive(Bijector):
    """
    y_i = x_i * exp(log_scale_i(x)) + shift_i(x), computed in one pass.

    The inverse solves the event dimension sequentially, one call of the
    shift/log-scale function per event element.
    """

    def __init__(self, shift_and_log_scale_fn: ShiftAndLogScaleFn, validate_args=False,
                 name='MaskedAutoregressive'):
        self._fn = shift_and_log_scale_fn
        super().__init__(forward_min_event_ndims=1, validate_args=validate_args, name=name)

    @property
    def shift_and_log_scale_fn(self) -> ShiftAndLogScaleFn:
        return self._fn

    def audit_dependence(self, x: np.ndarray) -> None:
        """Perturb each x[j] and check that outputs at i <= j do not move."""
        shift, log_scale = self._fn(x)
        for j in range(x.shape[-1]):
            bumped = np.array(x)
            bumped[..., j] += 1.0
            shift_j, log_scale_j = self._fn(bumped)
            if (not np.array_equal(shift[..., :j + 1], shift_j[..., :j + 1])
                    or not np.array_equal(log_scale[..., :j + 1], log_scale_j[..., :j + 1])):
                raise DependenceViolation(
                    f'{self.name}: outputs at positions <= {j} depend on input {j}')

    def _check_forward_domain(self, x):
        self.audit_dependence(x)

    def _forward(self, x):
        shift, log_scale = self._fn(x)
        return x * np.exp(log_scale) + shift

    def _inverse(self, y):
        x = np.zeros_like(y)
        for i in range(y.shape[-1]):
            shift, log_scale = self._fn(x)
            x[..., i] = (y[..., i] - shift[..., i]) * np.exp(-log_scale[..., i])
        return x

    def _forward_log_det_jacobian(self, x):
        _, log_scale = self._fn(x)
        return np.sum(log_scale, axis=-1)
