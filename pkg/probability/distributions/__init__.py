from .base import (
    FULLY_REPARAMETERIZED, NOT_REPARAMETERIZED, Distribution, ReparameterizationType, ShapeTriple,
)
from .continuous import Beta, Cauchy, Exponential, Gamma, Laplace, Normal, StudentT, Uniform
from .discrete import Bernoulli, Categorical, OneHotCategorical, Poisson
from .meta import Autoregressive, Independent, Mixture, MixtureSameFamily, kde
from .multivariate import Dirichlet, MultivariateNormalDiag, MultivariateNormalTriL
from .transformed import TransformedDistribution

# family name -> class, the names model specs use
FAMILIES = {
    cls.__name__: cls for cls in (
        Normal, Laplace, Exponential, Gamma, Beta, Cauchy, StudentT, Uniform,
        Bernoulli, Categorical, OneHotCategorical, Poisson,
        Dirichlet, MultivariateNormalDiag, MultivariateNormalTriL,
    )
}

__all__ = [
    'Autoregressive', 'Bernoulli', 'Beta', 'Categorical', 'Cauchy', 'Dirichlet', 'Distribution',
    'Exponential', 'FAMILIES', 'FULLY_REPARAMETERIZED', 'Gamma', 'Independent', 'Laplace', 'Mixture',
    'MixtureSameFamily', 'MultivariateNormalDiag', 'MultivariateNormalTriL', 'NOT_REPARAMETERIZED',
    'Normal', 'OneHotCategorical', 'Poisson', 'ReparameterizationType', 'ShapeTriple', 'StudentT',
    'TransformedDistribution', 'Uniform', 'kde',
]
