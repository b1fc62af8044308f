from .affine import Affine
from .autoregressive import LinearAutoregressiveFn, MaskedAutoregressive
from .base import Bijector, BijectorCache, CacheToken, Chain, Invert, PreimageSet
from .elementwise import AbsValue, Exp, Identity, Sigmoid, Softplus, Square
from .structural import Permute, Reshape, SoftmaxCentered

__all__ = [
    'AbsValue', 'Affine', 'Bijector', 'BijectorCache', 'CacheToken', 'Chain', 'Exp',
    'Identity', 'Invert', 'LinearAutoregressiveFn', 'MaskedAutoregressive', 'Permute',
    'PreimageSet', 'Reshape', 'Sigmoid', 'SoftmaxCentered', 'Softplus', 'Square',
]
