"""
Self-check suites.

Each suite draws from fixed seeds and returns a JSON-friendly dict
``{'name', 'passed', 'checks', 'failures'}`` so results can travel
through Celery unchanged.
"""
import logging
from typing import Callable, Dict, List

import numpy as np
from django.test import override_settings
from scipy import stats

from . import rng as rng_lib
from .bijectors import (
    Affine, Chain, Exp, Identity, Invert, LinearAutoregressiveFn, MaskedAutoregressive, Permute,
    Reshape, Sigmoid, SoftmaxCentered, Softplus,
)
from .conf import get_setting
from .distributions import (
    Bernoulli, Beta, Categorical, Cauchy, Dirichlet, Exponential, Gamma, Laplace,
    MultivariateNormalDiag, MultivariateNormalTriL, Normal, OneHotCategorical, Poisson, StudentT,
    TransformedDistribution, Uniform,
)
from .rng import RngState

logger = logging.getLogger('probability')

MOMENT_SAMPLES = 200_000
ROUNDTRIP_POINTS = 1000
JACOBIAN_POINTS = 20


def reference_distributions() -> Dict[str, object]:
    """One parameterization per family, with batch shapes where they add coverage."""
    return {
        'Normal': Normal(1.5, 2.0),
        'Laplace': Laplace(-1.0, 0.5),
        'Cauchy': Cauchy(0.5, 1.5),
        'Uniform': Uniform(-1.0, 3.0),
        'Exponential': Exponential([0.5, 2.0]),
        'Gamma': Gamma([0.4, 2.5], rate=1.5),
        'Beta': Beta(2.0, [0.7, 3.0]),
        'StudentT': StudentT(7.0, 1.0, 2.0),
        'Bernoulli': Bernoulli(probs=[0.3, 0.9]),
        'Categorical': Categorical(probs=[0.2, 0.5, 0.3]),
        'OneHotCategorical': OneHotCategorical(probs=[0.2, 0.5, 0.3]),
        'Poisson': Poisson([3.0, 25.0]),
        'Dirichlet': Dirichlet([2.0, 3.0, 4.0]),
        'MultivariateNormalDiag': MultivariateNormalDiag([1.0, -1.0], [0.5, 2.0]),
        'MultivariateNormalTriL': MultivariateNormalTriL([0.0, 1.0], [[1.0, 0.0], [0.5, 2.0]]),
    }


def reference_bijectors(rng: RngState) -> Dict[str, tuple]:
    """name -> (bijector, sampler of valid inputs with ``n`` leading points)."""
    tril = np.array([[1.5, 0.0, 0.0], [0.3, 0.8, 0.0], [-0.4, 0.2, 2.0]])
    flow_fn = LinearAutoregressiveFn.random(4, rng)

    def reals(width=3.0, event=()):
        return lambda r, n: width * (2.0 * rng_lib.uniform(r, (n,) + event) - 1.0)

    return {
        'Identity': (Identity(), reals()),
        'Exp': (Exp(), reals(5.0)),
        'Sigmoid': (Sigmoid(), reals(10.0)),
        'Softplus': (Softplus(), reals(10.0)),
        'AffineScalar': (Affine(shift=1.0, scale_identity_multiplier=-2.0), reals()),
        'AffineDiag': (Affine(shift=[1.0, 2.0], scale_diag=[0.5, 3.0]), reals(event=(2,))),
        'AffineTriL': (Affine(shift=[0.0, 1.0, -1.0], scale_tril=tril), reals(event=(3,))),
        'Permute': (Permute([2, 0, 1]), reals(event=(3,))),
        'Reshape': (Reshape([2, 3], [6]), reals(event=(6,))),
        'SoftmaxCentered': (SoftmaxCentered(), reals(event=(3,))),
        'MaskedAutoregressive': (MaskedAutoregressive(flow_fn), reals(event=(4,))),
        'Chain': (Chain([Exp(), Affine(shift=0.5, scale_identity_multiplier=0.5)]), reals()),
        'InvertExp': (Invert(Exp()), lambda r, n: np.exp(reals(3.0)(r, n))),
    }


def _result(name, checks, failures) -> Dict:
    return {'name': name, 'passed': not failures, 'checks': checks, 'failures': failures}


def _seeds(seed):
    if seed is None:
        return [int(s) for s in get_setting('DISTKIT_SELFCHECK_SEEDS')]
    return [int(seed), int(seed) + 1, int(seed) + 2]


def random_kernels_suite(seed=None) -> Dict:
    """One-sample KS tests of the uniform, normal and gamma kernels; 2 of 3 seeds must pass."""
    n = int(get_setting('DISTKIT_SELFCHECK_SAMPLES'))
    threshold = 1.63 / np.sqrt(n)
    cases = {
        'uniform': (lambda r: rng_lib.uniform(r, (n,)), stats.uniform.cdf),
        'standard_normal': (lambda r: rng_lib.standard_normal(r, (n,)), stats.norm.cdf),
        'standard_gamma(0.3)': (lambda r: rng_lib.standard_gamma(r, 0.3, (n,)), stats.gamma(0.3).cdf),
        'standard_gamma(1.0)': (lambda r: rng_lib.standard_gamma(r, 1.0, (n,)), stats.expon.cdf),
        'standard_gamma(4.0)': (lambda r: rng_lib.standard_gamma(r, 4.0, (n,)), stats.gamma(4.0).cdf),
    }
    failures = []
    for label, (draw, cdf) in cases.items():
        statistics = [float(stats.kstest(draw(RngState.from_seed(s)), cdf).statistic) for s in _seeds(seed)]
        if sum(d < threshold for d in statistics) < 2:
            failures.append(f'{label}: KS statistics {statistics} vs threshold {threshold:.4g}')
    return _result('random_kernels', len(cases), failures)


def quantile_suite(seed=None) -> Dict:
    """Two-sample KS between the sampler and quantile(uniform) for every family with a quantile."""
    n = int(get_setting('DISTKIT_SELFCHECK_SAMPLES'))
    threshold = 1.92 * np.sqrt(2.0 / n)
    names = ['Normal', 'Laplace', 'Cauchy', 'Uniform', 'Exponential', 'Gamma', 'Beta', 'StudentT']
    catalog = reference_distributions()
    failures = []
    for name in names:
        dist = catalog[name]
        passes = 0
        statistics = []
        for s in _seeds(seed):
            sample_rng, uniform_rng = RngState.from_seed(s).split(2)
            drawn = dist.sample((n,), sample_rng).reshape(n, -1)
            inverted = dist.quantile(
                rng_lib.uniform(uniform_rng, (n,) + dist.batch_shape)).reshape(n, -1)
            worst = max(stats.ks_2samp(drawn[:, j], inverted[:, j]).statistic
                        for j in range(drawn.shape[1]))
            statistics.append(float(worst))
            passes += worst < threshold
        if passes < 2:
            failures.append(f'{name}: KS statistics {statistics} vs threshold {threshold:.4g}')
    return _result('quantile', len(names), failures)


def _expected_moments(name, dist):
    if name == 'Categorical':
        k = np.arange(dist.num_categories)
        mean = np.sum(dist.probs * k, axis=-1)
        return mean, np.sum(dist.probs * np.square(k - mean), axis=-1)
    return dist.mean(), dist.variance()


def moments_suite(seed=None) -> Dict:
    """
    Sample mean within 4 standard errors of the analytic mean and sample
    variance within 5% of the analytic variance, for every family. The
    Cauchy has neither, so its sample median is checked against loc.
    """
    seed = _seeds(seed)[0]
    failures = []
    catalog = reference_distributions()
    for name, dist in catalog.items():
        x = np.asarray(dist.sample((MOMENT_SAMPLES,), RngState.from_seed(seed)), dtype=np.float64)
        if name == 'Cauchy':
            tolerance = 4.0 * np.pi * dist.scale / (2.0 * np.sqrt(MOMENT_SAMPLES))
            if np.any(np.abs(np.median(x, axis=0) - dist.loc) > tolerance):
                failures.append(f'{name}: sample median {np.median(x, axis=0)} vs loc {dist.loc}')
            continue
        mean, variance = _expected_moments(name, dist)
        sample_mean = np.mean(x, axis=0)
        sample_var = np.var(x, axis=0, ddof=1)
        if np.any(np.abs(sample_mean - mean) > 4.0 * np.sqrt(variance / MOMENT_SAMPLES)):
            failures.append(f'{name}: sample mean {sample_mean.tolist()} vs {np.asarray(mean).tolist()}')
        positive = variance > 0
        ratio = sample_var / np.where(positive, variance, 1.0)
        if np.any(positive & (np.abs(ratio - 1.0) > 0.05)):
            failures.append(f'{name}: sample variance {sample_var.tolist()} vs {np.asarray(variance).tolist()}')
    return _result('moments', len(catalog), failures)


def bijector_roundtrip_suite(seed=None) -> Dict:
    """max |inverse(forward(x)) - x| < 1e-9, computed without the preimage cache."""
    build_rng, point_rng = RngState.from_seed(_seeds(seed)[0]).split(2)
    catalog = reference_bijectors(build_rng)
    failures = []
    for (name, (bijector, draw)), r in zip(catalog.items(), point_rng.split(len(catalog))):
        x = draw(r, ROUNDTRIP_POINTS)
        # a copy of y is not in the cache, so the inverse kernel runs
        back = bijector.inverse(np.array(bijector.forward(x)))
        error = float(np.max(np.abs(back - x)))
        if not error < 1e-9:
            failures.append(f'{name}: round-trip error {error:.3g}')
    return _result('bijector_roundtrip', len(catalog), failures)


def finite_difference_log_det(bijector, x: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """
    log|det J| of ``bijector.forward`` at each point of ``x`` (shape [n, d])
    by central differences. Outputs are flattened and truncated to d
    coordinates, which is the volume convention for SoftmaxCentered.
    """
    n, d = x.shape
    columns = []
    for j in range(d):
        bump = np.zeros(d)
        bump[j] = step
        hi = np.reshape(bijector.forward(x + bump), (n, -1))[:, :d]
        lo = np.reshape(bijector.forward(x - bump), (n, -1))[:, :d]
        columns.append((hi - lo) / (2.0 * step))
    jacobian = np.stack(columns, axis=-1)
    return np.linalg.slogdet(jacobian)[1]


def jacobian_suite(seed=None) -> Dict:
    """ildj agrees with the finite-difference log|det J| within 1e-5 relative."""
    build_rng, point_rng = RngState.from_seed(_seeds(seed)[0]).split(2)
    catalog = reference_bijectors(build_rng)
    failures = []
    for (name, (bijector, draw)), r in zip(catalog.items(), point_rng.split(len(catalog))):
        scalar = bijector.forward_min_event_ndims == 0
        x = draw(r, 3 * JACOBIAN_POINTS if scalar else JACOBIAN_POINTS)
        if scalar:
            x = x.reshape(JACOBIAN_POINTS, 3)
        y = np.array(bijector.forward(x))
        event_ndims = bijector.forward_event_ndims(1)
        ildj = np.asarray(bijector.inverse_log_det_jacobian(y, event_ndims))
        reference = -finite_difference_log_det(bijector, x)
        error = np.abs(ildj - reference) / np.maximum(1.0, np.abs(reference))
        if not np.all(error < 1e-5):
            failures.append(f'{name}: worst relative ildj error {float(np.max(error)):.3g}')
    return _result('jacobian', len(catalog), failures)


def caching_suite(seed=None) -> Dict:
    """
    log_prob of a TransformedDistribution's own samples never runs the
    inverse kernel; with caching off the kernel runs and agrees within 1e-9.
    """
    seed = _seeds(seed)[0]
    failures = []

    def sample_and_score():
        bijector = Exp()
        dist = TransformedDistribution(Normal(0.0, 1.0), bijector)
        y = dist.sample((256,), RngState.from_seed(seed))
        bijector.reset_counters()
        return dist.log_prob(y), bijector.inverse_kernel_calls

    cached, cached_calls = sample_and_score()
    with override_settings(DISTKIT_CACHE=False):
        uncached, uncached_calls = sample_and_score()
    if cached_calls != 0:
        failures.append(f'cached path ran the inverse kernel {cached_calls} times')
    if uncached_calls == 0:
        failures.append('uncached path never ran the inverse kernel')
    error = float(np.max(np.abs(cached - uncached)))
    if not error < 1e-9:
        failures.append(f'cached and uncached log_prob differ by {error:.3g}')
    return _result('caching', 3, failures)


SUITES: Dict[str, Callable[..., Dict]] = {
    'random_kernels': random_kernels_suite,
    'quantile': quantile_suite,
    'moments': moments_suite,
    'bijector_roundtrip': bijector_roundtrip_suite,
    'jacobian': jacobian_suite,
    'caching': caching_suite,
}


def run_suite(name: str, seed=None) -> Dict:
    logger.info(f'Running selfcheck suite {name}')
    try:
        result = SUITES[name](seed)
    except Exception as exc:
        logger.error(f'Selfcheck suite {name} raised: {exc}', exc_info=True)
        result = _result(name, 0, [f'raised {type(exc).__name__}: {exc}'])
    level = logging.INFO if result['passed'] else logging.WARNING
    logger.log(level, f'Selfcheck suite {name}: {"passed" if result["passed"] else "FAILED"}')
    return result


def run_suites(seed=None, names: List[str] = None) -> Dict:
    """Run ``names`` (all suites by default); the report passes when every suite does."""
    results = [run_suite(name, seed) for name in (names or list(SUITES))]
    return {'seed': seed, 'passed': all(r['passed'] for r in results), 'suites': results}
