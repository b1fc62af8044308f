"""
Affine bijector: Y = scale @ X + shift.
"""
from typing import Optional

import numpy as np

from ..exceptions import InvalidParameter, ShapeError
from ..numcore import freeze, resolve_dtype
from .base import Bijector


def solve_lower_triangular(tril: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Batched forward substitution for ``tril @ x = rhs``."""
    d = tril.shape[-1]
    shape = np.broadcast_shapes(rhs.shape, tril.shape[:-1])
    x = np.zeros(shape, dtype=np.result_type(tril, rhs))
    for i in range(d):
        partial = np.sum(tril[..., i, :i] * x[..., :i], axis=-1)
        x[..., i] = (rhs[..., i] - partial) / tril[..., i, i]
    return x


class Affine(Bijector):
    """
    ``shift`` plus at most one scale operator: ``scale_identity_multiplier``
    (a scalar, acting elementwise), ``scale_diag`` (vector) or
    ``scale_tril`` (lower-triangular matrix). The jacobian is constant.
    """

    def __init__(self, shift=None, scale_identity_multiplier=None, scale_diag=None, scale_tril=None,
                 validate_args=False, dtype=None, name='Affine'):
        given = [k for k, v in (('scale_identity_multiplier', scale_identity_multiplier),
                                ('scale_diag', scale_diag), ('scale_tril', scale_tril)) if v is not None]
        if len(given) > 1:
            raise InvalidParameter(f'Affine accepts one scale operator, got {", ".join(given)}')
        values = [v for v in (shift, scale_identity_multiplier, scale_diag, scale_tril) if v is not None]
        dtype = resolve_dtype(*values, dtype=dtype)
        self._kind = given[0] if given else None
        self._shift = None if shift is None else freeze(np.array(shift, dtype=dtype))
        self._multiplier = None
        self._diag = None
        self._tril = None
        if self._kind == 'scale_identity_multiplier':
            self._multiplier = freeze(np.array(scale_identity_multiplier, dtype=dtype))
            diagonal = self._multiplier
        elif self._kind == 'scale_diag':
            self._diag = freeze(np.array(scale_diag, dtype=dtype))
            if self._diag.ndim < 1:
                raise ShapeError('scale_diag must have rank >= 1')
            diagonal = self._diag
        elif self._kind == 'scale_tril':
            tril = np.array(scale_tril, dtype=dtype)
            if tril.ndim < 2 or tril.shape[-1] != tril.shape[-2]:
                raise ShapeError(f'scale_tril must be square, got shape {list(tril.shape)}')
            if validate_args and np.any(np.triu(tril, 1) != 0):
                raise InvalidParameter('scale_tril must be lower-triangular')
            self._tril = freeze(np.tril(tril))
            diagonal = np.diagonal(self._tril, axis1=-2, axis2=-1)
        else:
            diagonal = np.ones((), dtype=dtype)
        if validate_args and np.any(diagonal == 0):
            raise InvalidParameter(f'{self._kind} has a zero on its diagonal')
        self._log_abs_diag = freeze(np.log(np.abs(diagonal)))
        super().__init__(
            forward_min_event_ndims=1 if self._kind in ('scale_diag', 'scale_tril') else 0,
            is_constant_jacobian=True, validate_args=validate_args, dtype=dtype, name=name,
        )

    @property
    def shift(self) -> Optional[np.ndarray]:
        return self._shift

    @property
    def scale_identity_multiplier(self):
        return self._multiplier

    @property
    def scale_diag(self):
        return self._diag

    @property
    def scale_tril(self):
        return self._tril

    @property
    def event_size(self) -> Optional[int]:
        if self._diag is not None:
            return self._diag.shape[-1]
        if self._tril is not None:
            return self._tril.shape[-1]
        return None

    def scale_matrix(self) -> np.ndarray:
        """The dense scale operator (diag and tril kinds only)."""
        if self._tril is not None:
            return self._tril
        if self._diag is not None:
            return self._diag[..., :, None] * np.eye(self._diag.shape[-1], dtype=self._diag.dtype)
        raise NotImplementedError('Elementwise Affine has no dense scale matrix')

    def _apply_shift(self, x, sign=1.0):
        return x if self._shift is None else x + sign * self._shift

    def _forward(self, x):
        if self._multiplier is not None:
            y = self._multiplier * x
        elif self._diag is not None:
            y = self._diag * x
        elif self._tril is not None:
            y = np.einsum('...ij,...j->...i', self._tril, x)
        else:
            y = x
        return self._apply_shift(y)

    def _inverse(self, y):
        r = self._apply_shift(y, -1.0)
        if self._multiplier is not None:
            return r / self._multiplier
        if self._diag is not None:
            return r / self._diag
        if self._tril is not None:
            return solve_lower_triangular(self._tril, r)
        return np.array(r)

    def _forward_log_det_jacobian(self, x):
        if self._kind in ('scale_diag', 'scale_tril'):
            return np.sum(self._log_abs_diag, axis=-1)
        return self._log_abs_diag

    def _inverse_log_det_jacobian(self, y):
        return -self._forward_log_det_jacobian(y)

    def _check_size(self, shape):
        size = self.event_size
        if size is not None and (not shape or shape[-1] != size):
            raise ShapeError(f'{self.name} acts on events of size {size}, got event shape {list(shape)}')
        return shape

    def _forward_event_shape(self, shape):
        return self._check_size(shape)

    def _inverse_event_shape(self, shape):
        return self._check_size(shape)
