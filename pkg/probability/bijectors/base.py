"""
The Bijector contract, its preimage cache, and the Chain/Invert combinators.

Subclasses implement ``_forward``, ``_inverse`` and at least one of
``_forward_log_det_jacobian`` / ``_inverse_log_det_jacobian``, each at the
bijector's minimum event rank. The public methods handle conversion,
validation, caching and reduction over any extra event dimensions.
"""
import collections
import dataclasses
import itertools
import logging
import threading
from typing import Optional, Tuple

import numpy as np

from ..conf import cache_enabled, cache_size
from ..exceptions import DTypeError, NotInvertible, ShapeError
from ..numcore import F64, as_ndvalue, as_shape, freeze, is_frozen, sum_rightmost

logger = logging.getLogger('probability')

_token_ids = itertools.count(1)


@dataclasses.dataclass(frozen=True)
class CacheToken:
    """Provenance id of a value produced by a bijector."""
    id: int


@dataclasses.dataclass(frozen=True)
class PreimageSet:
    """Ordered preimages of one output under a smooth covering."""
    branches: Tuple[np.ndarray, ...]

    def __len__(self):
        return len(self.branches)

    def __iter__(self):
        return iter(self.branches)

    def distinct(self) -> Tuple[np.ndarray, ...]:
        """Branches with exact duplicates removed (the fold point keeps one)."""
        kept = []
        for branch in self.branches:
            if not any(np.array_equal(branch, other) for other in kept):
                kept.append(branch)
        return tuple(kept)


class _CacheEntry:
    __slots__ = ('token', 'x', 'y', 'fldj')

    def __init__(self, x, y):
        self.token = CacheToken(next(_token_ids))
        self.x = x
        self.y = y
        self.fldj = {}


class BijectorCache:
    """
    Bounded LRU map between forward inputs and outputs.

    Entries are looked up by object identity and hold strong references to
    both values, so an id can never be reused while its entry is live. Only
    frozen arrays are keys: a value its owner can still write is stored as a
    frozen copy and never matched by identity.
    """

    def __init__(self, owner: str):
        self._owner = owner
        self._entries = collections.OrderedDict()
        self._by_x = {}
        self._by_y = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._entries)

    def _touch(self, entry: Optional[_CacheEntry]) -> Optional[_CacheEntry]:
        if entry is not None:
            self._entries.move_to_end(entry.token.id)
        return entry

    def by_x(self, x) -> Optional[_CacheEntry]:
        with self._lock:
            entry = self._by_x.get(id(x))
            if entry is not None and entry.x is x and is_frozen(x):
                return self._touch(entry)
        return None

    def by_y(self, y) -> Optional[_CacheEntry]:
        with self._lock:
            entry = self._by_y.get(id(y))
            if entry is not None and entry.y is y and is_frozen(y):
                logger.debug('%s cache hit for token %d', self._owner, entry.token.id)
                return self._touch(entry)
        return None

    def token_for(self, value) -> Optional[CacheToken]:
        with self._lock:
            for index, attr in ((self._by_y, 'y'), (self._by_x, 'x')):
                entry = index.get(id(value))
                if entry is not None and getattr(entry, attr) is value and is_frozen(value):
                    return entry.token
        return None

    def put(self, x, y) -> _CacheEntry:
        x_is_key, y_is_key = is_frozen(x), is_frozen(y)
        entry = _CacheEntry(x if x_is_key else freeze(np.array(x)), y if y_is_key else freeze(np.array(y)))
        capacity = cache_size()
        with self._lock:
            self._entries[entry.token.id] = entry
            if x_is_key:
                self._by_x[id(x)] = entry
            if y_is_key:
                self._by_y[id(y)] = entry
            while len(self._entries) > capacity:
                _, old = self._entries.popitem(last=False)
                if self._by_x.get(id(old.x)) is old:
                    del self._by_x[id(old.x)]
                if self._by_y.get(id(old.y)) is old:
                    del self._by_y[id(old.y)]
                logger.debug('%s cache evicted token %d', self._owner, old.token.id)
        return entry

    def clear(self):
        with self._lock:
            self._entries.clear()
            self._by_x.clear()
            self._by_y.clear()


class Bijector:
    """
    A diffeomorphism (or smooth covering) with tracked log-det-jacobian.

    ``forward_min_event_ndims`` is the smallest event rank the transform
    acts on jointly; ``inverse_min_event_ndims`` is the same rank seen from
    the output side and differs only for rank-changing bijectors.
    """
    _caching = True

    def __init__(self, *, forward_min_event_ndims: int, inverse_min_event_ndims: Optional[int] = None,
                 is_constant_jacobian: bool = False, is_injective: bool = True,
                 validate_args: bool = False, dtype=None, name: Optional[str] = None):
        self._forward_min_event_ndims = int(forward_min_event_ndims)
        self._inverse_min_event_ndims = int(
            forward_min_event_ndims if inverse_min_event_ndims is None else inverse_min_event_ndims)
        self._is_constant_jacobian = bool(is_constant_jacobian)
        self._is_injective = bool(is_injective)
        self._validate_args = bool(validate_args)
        self._dtype = None if dtype is None else np.dtype(dtype)
        self._name = name or type(self).__name__
        self._cache = BijectorCache(self._name)
        self._forward_calls = 0
        self._inverse_calls = 0
        self._counter_lock = threading.Lock()

    @property
    def name(self) -> str:
        return self._name

    @property
    def dtype(self):
        return self._dtype

    @property
    def forward_min_event_ndims(self) -> int:
        return self._forward_min_event_ndims

    @property
    def inverse_min_event_ndims(self) -> int:
        return self._inverse_min_event_ndims

    @property
    def is_constant_jacobian(self) -> bool:
        return self._is_constant_jacobian

    @property
    def is_injective(self) -> bool:
        return self._is_injective

    @property
    def is_elementwise(self) -> bool:
        return self._forward_min_event_ndims == 0 and self._inverse_min_event_ndims == 0

    @property
    def validate_args(self) -> bool:
        return self._validate_args

    @property
    def forward_kernel_calls(self) -> int:
        return self._forward_calls

    @property
    def inverse_kernel_calls(self) -> int:
        return self._inverse_calls

    def reset_counters(self):
        with self._counter_lock:
            self._forward_calls = 0
            self._inverse_calls = 0

    def clear_cache(self):
        self._cache.clear()

    def cache_token(self, value) -> Optional[CacheToken]:
        return self._cache.token_for(value)

    def __repr__(self):
        return f'<{self._name} forward_min_event_ndims={self._forward_min_event_ndims}>'

    # Conversion and bookkeeping.

    def _use_cache(self) -> bool:
        return self._caching and self._is_injective and cache_enabled()

    def _convert(self, value, min_ndims: int) -> np.ndarray:
        value = as_ndvalue(value)
        if value.dtype.kind != 'f':
            value = value.astype(self._dtype or F64)
        elif self._dtype is not None and value.dtype != self._dtype:
            raise DTypeError(f'{self._name} expects {self._dtype} values, got {value.dtype}')
        if value.ndim < min_ndims:
            raise ShapeError(f'{self._name} needs values of rank >= {min_ndims}, got shape {list(value.shape)}')
        return value

    def _event_ndims(self, event_ndims, min_ndims: int, value: np.ndarray) -> int:
        event_ndims = min_ndims if event_ndims is None else int(event_ndims)
        if event_ndims < min_ndims:
            raise ShapeError(f'{self._name} needs event_ndims >= {min_ndims}, got {event_ndims}')
        if event_ndims > value.ndim:
            raise ShapeError(f'event_ndims {event_ndims} exceeds value rank {value.ndim}')
        return event_ndims

    def forward_event_ndims(self, event_ndims: int) -> int:
        return event_ndims - self._forward_min_event_ndims + self._inverse_min_event_ndims

    def inverse_event_ndims(self, event_ndims: int) -> int:
        return event_ndims - self._inverse_min_event_ndims + self._forward_min_event_ndims

    @staticmethod
    def _reduce(ldj, value: np.ndarray, min_ndims: int, event_ndims: int) -> np.ndarray:
        batch = value.shape[:value.ndim - min_ndims]
        ldj = np.broadcast_to(np.asarray(ldj, dtype=value.dtype), batch)
        return np.asarray(sum_rightmost(ldj, event_ndims - min_ndims), dtype=value.dtype)

    @staticmethod
    def _own(output, source) -> np.ndarray:
        # read-only, never the caller's own array object, never a view of writable memory
        output = np.asarray(output)
        if output.base is not None and not is_frozen(output.base):
            output = output.copy()
        elif output is source:
            output = output.view() if is_frozen(output) else output.copy()
        return freeze(output)

    def _count(self, direction: str):
        with self._counter_lock:
            if direction == 'forward':
                self._forward_calls += 1
            else:
                self._inverse_calls += 1

    # Transforms.

    def forward(self, x) -> np.ndarray:
        x = self._convert(x, self._forward_min_event_ndims)
        use_cache = self._use_cache()
        if use_cache:
            entry = self._cache.by_x(x)
            if entry is not None:
                return entry.y
        if self._validate_args:
            self._check_forward_domain(x)
        self._count('forward')
        with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
            y = self._own(self._forward(x), x)
        if use_cache:
            self._cache.put(x, y)
        return y

    def inverse(self, y):
        """
        The preimage of ``y``. A smooth covering returns a PreimageSet of its
        distinct preimages, so a fold point such as AbsValue at 0 has one.
        """
        if not self._is_injective:
            return PreimageSet(self.inverse_branches(y).distinct())
        y = self._convert(y, self._inverse_min_event_ndims)
        use_cache = self._use_cache()
        if use_cache:
            entry = self._cache.by_y(y)
            if entry is not None:
                return entry.x
        if self._validate_args:
            self._check_inverse_range(y)
        self._count('inverse')
        with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
            x = self._own(self._inverse(y), y)
        if use_cache:
            self._cache.put(x, y)
        return x

    def inverse_branches(self, y) -> PreimageSet:
        """Every branch of a smooth covering at ``y``, aligned with ``inverse_log_det_jacobian``."""
        if self._is_injective:
            raise NotInvertible(f'{self._name} is injective and has a single inverse')
        y = self._convert(y, self._inverse_min_event_ndims)
        if self._validate_args:
            self._check_inverse_range(y)
        self._count('inverse')
        with np.errstate(divide='ignore', invalid='ignore'):
            branches = self._inverse(y)
        return PreimageSet(tuple(self._own(b, y) for b in branches))

    def forward_log_det_jacobian(self, x, event_ndims: Optional[int] = None) -> np.ndarray:
        x = self._convert(x, self._forward_min_event_ndims)
        event_ndims = self._event_ndims(event_ndims, self._forward_min_event_ndims, x)
        entry = self._cache.by_x(x) if self._use_cache() else None
        if entry is not None and event_ndims in entry.fldj:
            return entry.fldj[event_ndims]
        with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
            ldj = freeze(np.array(self._compute_fldj(x, event_ndims)))
        if entry is not None:
            entry.fldj[event_ndims] = ldj
        return ldj

    def inverse_log_det_jacobian(self, y, event_ndims: Optional[int] = None):
        """
        ILDJ at ``y``, reduced over ``event_ndims``. A smooth covering returns
        one value per branch of ``inverse_branches``, in branch order.
        """
        y = self._convert(y, self._inverse_min_event_ndims)
        event_ndims = self._event_ndims(event_ndims, self._inverse_min_event_ndims, y)
        with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
            if not self._is_injective:
                return tuple(self._reduce(ldj, y, self._inverse_min_event_ndims, event_ndims)
                             for ldj in self._covering_ildj(y))
            entry = self._cache.by_y(y) if self._use_cache() else None
            if entry is not None:
                return -self.forward_log_det_jacobian(entry.x, self.inverse_event_ndims(event_ndims))
            return self._compute_ildj(y, event_ndims)

    def _compute_fldj(self, x: np.ndarray, event_ndims: int) -> np.ndarray:
        try:
            ldj = self._forward_log_det_jacobian(x)
        except NotImplementedError:
            y = self.forward(x)
            return -self._reduce(self._inverse_log_det_jacobian(y), y, self._inverse_min_event_ndims,
                                 self.forward_event_ndims(event_ndims))
        return self._reduce(ldj, x, self._forward_min_event_ndims, event_ndims)

    def _compute_ildj(self, y: np.ndarray, event_ndims: int) -> np.ndarray:
        try:
            ldj = self._inverse_log_det_jacobian(y)
        except NotImplementedError:
            x = self.inverse(y)
            return -self._compute_fldj(x, self.inverse_event_ndims(event_ndims))
        return self._reduce(ldj, y, self._inverse_min_event_ndims, event_ndims)

    # Shape hooks.

    def forward_event_shape(self, shape) -> Tuple[int, ...]:
        return self._forward_event_shape(as_shape(shape))

    def inverse_event_shape(self, shape) -> Tuple[int, ...]:
        return self._inverse_event_shape(as_shape(shape))

    def _forward_event_shape(self, shape):
        return shape

    def _inverse_event_shape(self, shape):
        return shape

    # Subclass kernels.

    def _forward(self, x):
        raise NotImplementedError(f'{self._name} does not implement forward')

    def _inverse(self, y):
        raise NotImplementedError(f'{self._name} does not implement inverse')

    def _forward_log_det_jacobian(self, x):
        raise NotImplementedError

    def _inverse_log_det_jacobian(self, y):
        raise NotImplementedError

    def _covering_ildj(self, y):
        raise NotImplementedError

    def _check_forward_domain(self, x):
        pass

    def _check_inverse_range(self, y):
        pass


class Chain(Bijector):
    """
    Composition applied right to left: ``Chain([f, g]).forward(x) = f(g(x))``.
    An empty chain is the identity.
    """

    def __init__(self, bijectors=(), validate_args=False, name=None):
        self._bijectors = tuple(bijectors)
        for b in self._bijectors:
            if not b.is_injective:
                raise NotInvertible(f'Chain cannot compose the smooth covering {b.name}')
        offset, required = 0, 0
        for b in reversed(self._bijectors):
            required = max(required, b.forward_min_event_ndims - offset)
            offset += b.inverse_min_event_ndims - b.forward_min_event_ndims
        super().__init__(
            forward_min_event_ndims=required,
            inverse_min_event_ndims=required + offset,
            is_constant_jacobian=all(b.is_constant_jacobian for b in self._bijectors),
            validate_args=validate_args,
            name=name or 'Chain',
        )

    @property
    def bijectors(self):
        return self._bijectors

    @property
    def is_elementwise(self) -> bool:
        return all(b.is_elementwise for b in self._bijectors)

    @property
    def forward_kernel_calls(self) -> int:
        return sum(b.forward_kernel_calls for b in self._bijectors)

    @property
    def inverse_kernel_calls(self) -> int:
        return sum(b.inverse_kernel_calls for b in self._bijectors)

    def reset_counters(self):
        for b in self._bijectors:
            b.reset_counters()

    def _forward(self, x):
        for b in reversed(self._bijectors):
            x = b.forward(x)
        return x

    def _inverse(self, y):
        for b in self._bijectors:
            y = b.inverse(y)
        return y

    def _compute_fldj(self, x, event_ndims):
        total = np.zeros(x.shape[:x.ndim - event_ndims], dtype=x.dtype)
        for b in reversed(self._bijectors):
            total = total + b.forward_log_det_jacobian(x, event_ndims)
            x = b.forward(x)
            event_ndims = b.forward_event_ndims(event_ndims)
        return total

    def _compute_ildj(self, y, event_ndims):
        total = np.zeros(y.shape[:y.ndim - event_ndims], dtype=y.dtype)
        for b in self._bijectors:
            total = total + b.inverse_log_det_jacobian(y, event_ndims)
            y = b.inverse(y)
            event_ndims = b.inverse_event_ndims(event_ndims)
        return total

    def _forward_event_shape(self, shape):
        for b in reversed(self._bijectors):
            shape = b.forward_event_shape(shape)
        return shape

    def _inverse_event_shape(self, shape):
        for b in self._bijectors:
            shape = b.inverse_event_shape(shape)
        return shape


class Invert(Bijector):
    """Swaps forward and inverse of an injective bijector."""
    _caching = False

    def __init__(self, bijector: Bijector, validate_args=False, name=None):
        if not bijector.is_injective:
            raise NotInvertible(f'{bijector.name} is a smooth covering and has no inverse map')
        self._bijector = bijector
        super().__init__(
            forward_min_event_ndims=bijector.inverse_min_event_ndims,
            inverse_min_event_ndims=bijector.forward_min_event_ndims,
            is_constant_jacobian=bijector.is_constant_jacobian,
            validate_args=validate_args,
            dtype=bijector.dtype,
            name=name or f'Invert{bijector.name}',
        )

    @property
    def bijector(self) -> Bijector:
        return self._bijector

    @property
    def is_elementwise(self) -> bool:
        return self._bijector.is_elementwise

    @property
    def forward_kernel_calls(self) -> int:
        return self._bijector.inverse_kernel_calls

    @property
    def inverse_kernel_calls(self) -> int:
        return self._bijector.forward_kernel_calls

    def reset_counters(self):
        self._bijector.reset_counters()

    def forward(self, x):
        return self._bijector.inverse(x)

    def inverse(self, y):
        return self._bijector.forward(y)

    def forward_log_det_jacobian(self, x, event_ndims=None):
        return self._bijector.inverse_log_det_jacobian(x, event_ndims)

    def inverse_log_det_jacobian(self, y, event_ndims=None):
        return self._bijector.forward_log_det_jacobian(y, event_ndims)

    def _forward_event_shape(self, shape):
        return self._bijector.inverse_event_shape(shape)

    def _inverse_event_shape(self, shape):
        return self._bijector.forward_event_shape(shape)
