"""
Scalar bijectors applied elementwise, plus the AbsValue and Square coverings.
"""
import numpy as np
from scipy import special as sp

from ..exceptions import DomainError
from ..numcore import softplus
from .base import Bijector


class Identity(Bijector):

    def __init__(self, validate_args=False, name='Identity'):
        super().__init__(forward_min_event_ndims=0, is_constant_jacobian=True,
                         validate_args=validate_args, name=name)

    def _forward(self, x):
        return x

    def _inverse(self, y):
        return y

    def _forward_log_det_jacobian(self, x):
        return np.zeros((), dtype=x.dtype)


class Exp(Bijector):
    """Y = exp(X)."""

    def __init__(self, validate_args=False, name='Exp'):
        super().__init__(forward_min_event_ndims=0, validate_args=validate_args, name=name)

    def _forward(self, x):
        return np.exp(x)

    def _inverse(self, y):
        return np.log(y)

    def _forward_log_det_jacobian(self, x):
        return x

    def _inverse_log_det_jacobian(self, y):
        return -np.log(y)

    def _check_inverse_range(self, y):
        if np.any(~(y > 0)):
            raise DomainError(f'{self.name}.inverse requires positive values')


class Sigmoid(Bijector):
    """Y = 1 / (1 + exp(-X))."""

    def __init__(self, validate_args=False, name='Sigmoid'):
        super().__init__(forward_min_event_ndims=0, validate_args=validate_args, name=name)

    def _forward(self, x):
        return sp.expit(x)

    def _inverse(self, y):
        return np.log(y) - np.log1p(-y)

    def _forward_log_det_jacobian(self, x):
        return -softplus(-x) - softplus(x)

    def _inverse_log_det_jacobian(self, y):
        return -np.log(y) - np.log1p(-y)

    def _check_inverse_range(self, y):
        if np.any(~((y > 0) & (y < 1))):
            raise DomainError(f'{self.name}.inverse requires values in (0, 1)')


class Softplus(Bijector):
    """Y = log(1 + exp(X))."""

    def __init__(self, validate_args=False, name='Softplus'):
        super().__init__(forward_min_event_ndims=0, validate_args=validate_args, name=name)

    def _forward(self, x):
        return softplus(x)

    def _inverse(self, y):
        # log(exp(y) - 1) without overflow
        return y + np.log(-np.expm1(-y))

    def _forward_log_det_jacobian(self, x):
        return -softplus(-x)

    def _inverse_log_det_jacobian(self, y):
        return -np.log(-np.expm1(-y))

    def _check_inverse_range(self, y):
        if np.any(~(y > 0)):
            raise DomainError(f'{self.name}.inverse requires positive values')


class AbsValue(Bijector):
    """Y = |X|; a two-branch covering whose inverse is {-y, y}."""

    def __init__(self, validate_args=False, name='AbsValue'):
        super().__init__(forward_min_event_ndims=0, is_constant_jacobian=True, is_injective=False,
                         validate_args=validate_args, name=name)

    def _forward(self, x):
        return np.abs(x)

    def _inverse(self, y):
        return (-y, y)

    def _forward_log_det_jacobian(self, x):
        return np.zeros((), dtype=x.dtype)

    def _covering_ildj(self, y):
        zero = np.zeros((), dtype=y.dtype)
        return (zero, zero)

    def _check_inverse_range(self, y):
        if np.any(~(y >= 0)):
            raise DomainError(f'{self.name}.inverse requires non-negative values')


class Square(Bijector):
    """Y = X ** 2 over the reals; inverse is {-sqrt(y), sqrt(y)}."""

    def __init__(self, validate_args=False, name='Square'):
        super().__init__(forward_min_event_ndims=0, is_injective=False,
                         validate_args=validate_args, name=name)

    def _forward(self, x):
        return np.square(x)

    def _inverse(self, y):
        if np.any(y < 0):
            raise DomainError(f'{self.name}.inverse is empty for negative values')
        root = np.sqrt(y)
        return (-root, root)

    def _forward_log_det_jacobian(self, x):
        return np.log(2.0 * np.abs(x))

    def _covering_ildj(self, y):
        ldj = -np.log(2.0) - 0.5 * np.log(y)
        return (ldj, ldj)
