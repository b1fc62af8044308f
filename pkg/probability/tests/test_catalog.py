"""
Tests for the family catalog against scipy references.
"""
import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose
from scipy import integrate, stats

from probability.distributions import (
    Bernoulli, Beta, Categorical, Cauchy, Dirichlet, Exponential, Gamma, Laplace,
    MultivariateNormalDiag, MultivariateNormalTriL, Normal, OneHotCategorical, Poisson,
    StudentT, Uniform,
)
from probability.rng import RngState

# (family, scipy frozen reference, support, interior points)
CONTINUOUS = [
    (Normal(1.5, 2.), stats.norm(1.5, 2.), (-np.inf, np.inf), [-3., 0., 1.5, 4.]),
    (Laplace(-1., .5), stats.laplace(-1., .5), (-np.inf, np.inf), [-2., -1.2, 0.3]),
    (Cauchy(.5, 1.5), stats.cauchy(.5, 1.5), (-np.inf, np.inf), [-10., .5, 3.]),
    (Uniform(-1., 3.), stats.uniform(-1., 4.), (-1., 3.), [-.5, 1., 2.9]),
    (Exponential(2.), stats.expon(scale=.5), (0., np.inf), [.1, 1., 3.]),
    (Gamma(2.5, 1.5), stats.gamma(2.5, scale=1 / 1.5), (0., np.inf), [.2, 1., 4.]),
    (Beta(2., 3.), stats.beta(2., 3.), (0., 1.), [.05, .4, .9]),
    (StudentT(7., 1., 2.), stats.t(7., 1., 2.), (-np.inf, np.inf), [-5., 1., 2.5]),
]


class ContinuousFamilyTest(SimpleTestCase):
    """Test densities, cdfs, quantiles and entropies of the scalar families."""

    def test_log_prob_matches_reference(self):
        for dist, ref, _, points in CONTINUOUS:
            with self.subTest(family=dist.name):
                assert_allclose(dist.log_prob(points), ref.logpdf(points), rtol=1e-10)

    def test_cdf_matches_reference(self):
        for dist, ref, _, points in CONTINUOUS:
            with self.subTest(family=dist.name):
                assert_allclose(dist.cdf(points), ref.cdf(points), rtol=1e-9, atol=1e-12)

    def test_entropy_matches_reference(self):
        for dist, ref, _, _ in CONTINUOUS:
            with self.subTest(family=dist.name):
                assert_allclose(dist.entropy(), ref.entropy(), rtol=1e-9)

    def test_density_integrates_to_one(self):
        for dist, _, (low, high), _ in CONTINUOUS:
            with self.subTest(family=dist.name):
                total, _ = integrate.quad(lambda x: float(dist.prob(x)), low, high, limit=200)
                self.assertAlmostEqual(total, 1.0, places=6)

    def test_cdf_derivative_is_density(self):
        h = 1e-5
        for dist, _, _, points in CONTINUOUS:
            with self.subTest(family=dist.name):
                x = np.asarray(points)
                derivative = (dist.cdf(x + h) - dist.cdf(x - h)) / (2 * h)
                assert_allclose(derivative, dist.prob(x), rtol=1e-5, atol=1e-8)

    def test_quantile_inverts_cdf(self):
        for dist, _, _, points in CONTINUOUS:
            with self.subTest(family=dist.name):
                assert_allclose(dist.quantile(dist.cdf(points)), points, rtol=1e-7, atol=1e-9)

    def test_uniform_support_is_half_open(self):
        dist = Uniform(-1., 3.)
        assert_allclose(dist.prob([-1., 2.999]), [.25, .25])
        self.assertEqual(float(dist.prob(3.)), 0.0)
        self.assertEqual(float(dist.log_prob(3.)), -np.inf)
        x = dist.sample((10_000,), RngState.from_seed(3))
        self.assertTrue(np.all((x >= -1.) & (x < 3.)))

    def test_exponential_median(self):
        assert_allclose(Exponential(2.).quantile(0.5), np.log(2.) / 2., rtol=1e-12)

    def test_normal_quantile_tails(self):
        assert_allclose(Normal(0., 1.).quantile([0.025, 0.975]), [-1.959963984540054, 1.959963984540054])

    def test_moments_match_reference(self):
        for dist, ref, _, _ in CONTINUOUS:
            if isinstance(dist, Cauchy):
                continue
            with self.subTest(family=dist.name):
                assert_allclose(dist.mean(), ref.mean(), rtol=1e-12)
                assert_allclose(dist.variance(), ref.var(), rtol=1e-12)


class DiscreteFamilyTest(SimpleTestCase):
    """Test the integer-valued families."""

    def test_poisson_cdf(self):
        assert_allclose(Poisson(rate=4.).cdf(3.), 0.43347012036670896, rtol=1e-10)

    def test_poisson_cdf_between_integers(self):
        assert_allclose(Poisson(rate=4.).cdf(3.5), Poisson(rate=4.).cdf(3.), rtol=1e-12)
        self.assertEqual(float(Poisson(rate=4.).cdf(-0.5)), 0.0)

    def test_poisson_log_prob(self):
        k = np.arange(10.)
        assert_allclose(Poisson(rate=3.).log_prob(k), stats.poisson(3.).logpmf(k), rtol=1e-10)

    def test_poisson_mass_sums_to_one(self):
        k = np.arange(200.)
        self.assertAlmostEqual(float(np.sum(Poisson(rate=25.).prob(k))), 1.0, places=10)

    def test_bernoulli_mass(self):
        dist = Bernoulli(probs=[.3, .9])
        assert_allclose(dist.prob([[0.], [1.]]), [[.7, .1], [.3, .9]], rtol=1e-12)

    def test_categorical_log_prob(self):
        probs = np.array([.2, .5, .3])
        assert_allclose(Categorical(probs=probs).log_prob([0., 1., 2.]), np.log(probs), rtol=1e-12)
        self.assertEqual(float(Categorical(probs=probs).log_prob(3.)), -np.inf)

    def test_one_hot_matches_categorical(self):
        logits = np.array([0.1, -1.0, 2.0])
        onehot = OneHotCategorical(logits=logits)
        cat = Categorical(logits=logits)
        self.assertEqual(onehot.event_shape, (3,))
        assert_allclose(onehot.log_prob(np.eye(3)), cat.log_prob([0., 1., 2.]), rtol=1e-12)
        assert_allclose(onehot.entropy(), cat.entropy(), rtol=1e-12)

    def test_one_hot_samples(self):
        x = OneHotCategorical(probs=[.2, .5, .3]).sample((100,), RngState.from_seed(4))
        self.assertEqual(x.shape, (100, 3))
        self.assertTrue(np.all(x.sum(axis=-1) == 1))


class MultivariateFamilyTest(SimpleTestCase):
    """Test Dirichlet and the multivariate normals."""

    def test_tril_matches_quadratic_form(self):
        loc = np.array([0., 1.])
        tril = np.array([[1., 0.], [.5, 2.]])
        x = np.array([.3, -.4])
        z = np.linalg.solve(tril, x - loc)
        expected = -np.log(2 * np.pi) - np.log(2.) - 0.5 * z @ z
        assert_allclose(MultivariateNormalTriL(loc, tril).log_prob(x), expected, rtol=1e-12)

    def test_tril_matches_reference(self):
        loc = np.array([0., 1.])
        tril = np.array([[1., 0.], [.5, 2.]])
        x = np.array([[.3, -.4], [2., 2.]])
        ref = stats.multivariate_normal(loc, tril @ tril.T)
        assert_allclose(MultivariateNormalTriL(loc, tril).log_prob(x), ref.logpdf(x), rtol=1e-10)

    def test_tril_sample_covariance(self):
        n = 100_000
        tril = np.array([[1., 0., 0.], [.5, 2., 0.], [-.3, .4, 1.5]])
        x = MultivariateNormalTriL([1., 0., -2.], tril).sample((n,), RngState.from_seed(4))
        self.assertEqual(x.shape, (n, 3))
        assert_allclose(np.mean(x, axis=0), [1., 0., -2.], atol=0.05)
        assert_allclose(np.cov(x, rowvar=False), tril @ tril.T, atol=0.1)

    def test_diag_matches_independent_normals(self):
        dist = MultivariateNormalDiag([1., -1.], [.5, 2.])
        x = np.array([0.2, 0.7])
        assert_allclose(dist.log_prob(x), np.sum(Normal([1., -1.], [.5, 2.]).log_prob(x)), rtol=1e-12)
        assert_allclose(dist.mean(), [1., -1.])

    def test_dirichlet_matches_reference(self):
        alpha = np.array([2., 3., 4.])
        x = np.array([.2, .3, .5])
        assert_allclose(Dirichlet(alpha).log_prob(x), stats.dirichlet(alpha).logpdf(x), rtol=1e-10)
        assert_allclose(Dirichlet(alpha).entropy(), stats.dirichlet(alpha).entropy(), rtol=1e-10)

    def test_dirichlet_samples_on_simplex(self):
        x = Dirichlet([2., 3., 4.]).sample((500,), RngState.from_seed(2))
        self.assertEqual(x.shape, (500, 3))
        self.assertTrue(np.all(x >= 0))
        assert_allclose(x.sum(axis=-1), 1.0, rtol=1e-12)

    def test_dirichlet_off_simplex(self):
        self.assertEqual(float(Dirichlet([2., 3., 4.]).log_prob([.5, .5, .5])), -np.inf)
