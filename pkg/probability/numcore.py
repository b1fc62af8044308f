"""
Dense arrays, broadcasting, stable reductions and special functions.

Every value flowing through the app is a numpy ``ndarray`` of one of three
dtypes (F32, F64, I64). Helpers here convert inputs, refuse silent
promotion between floating dtypes and expose the special functions the
densities need, with a shared DomainError/NaN contract.
"""
from typing import Iterable, Sequence, Tuple

import numpy as np
from scipy import special as sp

from .exceptions import DomainError, DTypeError, IncompatibleShapes

F32 = np.dtype(np.float32)
F64 = np.dtype(np.float64)
I64 = np.dtype(np.int64)

SUPPORTED_DTYPES = (F32, F64, I64)
PRECISIONS = {'f32': F32, 'f64': F64}

Shape = Tuple[int, ...]


def as_shape(shape) -> Shape:
    """Normalize an int, sequence or None into a tuple shape."""
    if shape is None:
        return ()
    if isinstance(shape, (int, np.integer)):
        shape = (int(shape),)
    dims = tuple(int(d) for d in shape)
    if any(d < 0 for d in dims):
        raise IncompatibleShapes(f'Shape {dims} has a negative extent')
    return dims


def resolve_dtype(*values, dtype=None) -> np.dtype:
    """
    Pick the floating dtype shared by ``values``.

    Explicitly typed floating arrays must agree; Python scalars and lists
    adopt whatever the arrays (or ``dtype``) say, defaulting to F64.
    """
    seen = {
        np.asarray(v).dtype for v in values
        if isinstance(v, (np.ndarray, np.floating)) and np.asarray(v).dtype.kind == 'f'
    }
    if dtype is not None:
        dtype = np.dtype(dtype)
        if dtype not in SUPPORTED_DTYPES:
            raise DTypeError(f'Unsupported dtype {dtype}')
        seen.add(dtype)
    if len(seen) > 1:
        names = ', '.join(sorted(str(d) for d in seen))
        raise DTypeError(f'Mixed floating dtypes: {names}')
    dtype = seen.pop() if seen else F64
    if dtype not in (F32, F64):
        raise DTypeError(f'Unsupported floating dtype {dtype}')
    return dtype


def as_ndvalue(value, dtype=None) -> np.ndarray:
    """
    Convert ``value`` to an ndarray of ``dtype``.

    Returns the same object when it already has the requested dtype, which
    keeps bijector cache identities intact.
    """
    if dtype is None:
        arr = np.asarray(value)
        if arr.dtype.kind in 'biu':
            return arr.astype(I64, copy=False)
        return arr.astype(resolve_dtype(arr), copy=False)
    dtype = np.dtype(dtype)
    if isinstance(value, np.ndarray):
        if value.dtype == dtype:
            return value
        if value.dtype.kind == 'f' and dtype.kind == 'f':
            raise DTypeError(f'Expected {dtype} value, got {value.dtype}')
    return np.asarray(value, dtype=dtype)


def freeze(arr: np.ndarray) -> np.ndarray:
    """Mark an array read-only and return it."""
    arr = np.asarray(arr)
    arr.flags.writeable = False
    return arr


def is_frozen(arr) -> bool:
    """True when neither ``arr`` nor any array it views can be written."""
    while isinstance(arr, np.ndarray):
        if arr.flags.writeable:
            return False
        arr = arr.base
    return True


def broadcast_shapes(a, b) -> Shape:
    """Right-aligned broadcast of two shapes."""
    a, b = as_shape(a), as_shape(b)
    ndim = max(len(a), len(b))
    a = (1,) * (ndim - len(a)) + a
    b = (1,) * (ndim - len(b)) + b
    out = []
    for da, db in zip(a, b):
        if da == db or db == 1:
            out.append(da)
        elif da == 1:
            out.append(db)
        else:
            raise IncompatibleShapes(f'Cannot broadcast shapes {a} and {b}')
    return tuple(out)


def broadcast_all(shapes: Iterable) -> Shape:
    out: Shape = ()
    for shape in shapes:
        out = broadcast_shapes(out, shape)
    return out


def log_sum_exp(x, axis: int = -1) -> np.ndarray:
    """log(sum(exp(x))) along ``axis`` with max subtraction."""
    x = as_ndvalue(x)
    if x.dtype.kind != 'f':
        raise DTypeError('log_sum_exp requires a floating value')
    if not -x.ndim <= axis < max(x.ndim, 1):
        raise IncompatibleShapes(f'Axis {axis} out of bounds for rank {x.ndim}')
    with np.errstate(invalid='ignore'):
        return np.asarray(sp.logsumexp(x, axis=axis), dtype=x.dtype)


def softplus(x) -> np.ndarray:
    x = np.asarray(x)
    return np.logaddexp(np.zeros((), dtype=x.dtype), x)


def log_softmax(logits, axis: int = -1) -> np.ndarray:
    logits = np.asarray(logits)
    return logits - sp.logsumexp(logits, axis=axis, keepdims=True)


def lbeta(a, b) -> np.ndarray:
    return sp.gammaln(a) + sp.gammaln(b) - sp.gammaln(np.add(a, b))


def _nonpositive_integer(x):
    return (x <= 0) & (np.floor(x) == x)


# name -> (kernel, predicate that is True where arguments are inside the domain)
_SPECIAL = {
    'lgamma': (sp.gammaln, lambda x: ~_nonpositive_integer(x)),
    'digamma': (sp.digamma, lambda x: ~_nonpositive_integer(x)),
    'erf': (sp.erf, lambda x: ~np.isnan(x)),
    'erfc': (sp.erfc, lambda x: ~np.isnan(x)),
    'reg_inc_gamma': (sp.gammainc, lambda a, x: (a > 0) & (x >= 0)),
    'reg_inc_gamma_upper': (sp.gammaincc, lambda a, x: (a > 0) & (x >= 0)),
    'reg_inc_beta': (sp.betainc, lambda a, b, x: (a > 0) & (b > 0) & (x >= 0) & (x <= 1)),
    'log1p': (np.log1p, lambda x: x >= -1),
    'expm1': (np.expm1, lambda x: ~np.isnan(x)),
    'softplus': (softplus, lambda x: ~np.isnan(x)),
}


def special(fn: str, *args, validate_args: bool = False) -> np.ndarray:
    """
    Evaluate a named special function elementwise.

    Out-of-domain arguments raise DomainError when ``validate_args``,
    otherwise they produce NaN.
    """
    try:
        kernel, in_domain = _SPECIAL[fn]
    except KeyError:
        raise ValueError(f'Unknown special function {fn!r}') from None
    dtype = resolve_dtype(*args)
    args = [as_ndvalue(a, dtype) for a in args]
    with np.errstate(invalid='ignore', divide='ignore'):
        ok = np.asarray(in_domain(*args))
        if validate_args and not np.all(ok):
            raise DomainError(f'{fn} called outside its domain')
        result = np.asarray(kernel(*args), dtype=dtype)
    if not np.all(ok):
        result = np.where(ok, result, np.nan).astype(dtype)
    return result


def lgamma(x, validate_args=False):
    return special('lgamma', x, validate_args=validate_args)


def digamma(x, validate_args=False):
    return special('digamma', x, validate_args=validate_args)


def erf(x, validate_args=False):
    return special('erf', x, validate_args=validate_args)


def erfc(x, validate_args=False):
    return special('erfc', x, validate_args=validate_args)


def reg_inc_gamma(a, x, validate_args=False):
    return special('reg_inc_gamma', a, x, validate_args=validate_args)


def reg_inc_beta(a, b, x, validate_args=False):
    return special('reg_inc_beta', a, b, x, validate_args=validate_args)


def sum_rightmost(x, ndims: int) -> np.ndarray:
    """Sum over the trailing ``ndims`` axes (numpy pairwise order)."""
    if ndims == 0:
        return np.asarray(x)
    return np.sum(x, axis=tuple(range(-ndims, 0)))


def prod(shape: Sequence[int]) -> int:
    return int(np.prod(shape, dtype=np.int64)) if len(shape) else 1

