"""
Tests for random streams and variate kernels.
"""
import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_array_equal
from scipy import stats

from probability import rng as rng_lib
from probability.exceptions import InvalidParameter
from probability.rng import RngState

N = 20_000
KS_THRESHOLD = 1.63 / np.sqrt(N)
SEEDS = (11, 22, 33)


class RngStateTest(SimpleTestCase):
    """Test seed expansion and splitting."""

    def test_same_seed_same_words(self):
        a = rng_lib.uniform(RngState.from_seed(5), (3,))
        b = rng_lib.uniform(RngState.from_seed(5), (3,))
        assert_array_equal(a, b)

    def test_split_children_differ(self):
        parent = RngState.from_seed(5)
        left, right = parent.split(2)
        self.assertNotEqual(left, right)
        self.assertNotEqual(left, parent)
        self.assertFalse(np.array_equal(rng_lib.uniform(left, (8,)), rng_lib.uniform(right, (8,))))
        self.assertFalse(np.array_equal(rng_lib.uniform(left, (8,)), rng_lib.uniform(parent, (8,))))

    def test_split_is_deterministic(self):
        self.assertEqual(RngState.from_seed(9).split(3), RngState.from_seed(9).split(3))

    def test_seed_range(self):
        with self.assertRaises(ValueError):
            RngState.from_seed(-1)
        with self.assertRaises(ValueError):
            RngState.from_seed(1 << 64)


class UniformTest(SimpleTestCase):
    """Test the open-interval uniform kernel."""

    def test_scalar_shape(self):
        u = rng_lib.uniform(RngState.from_seed(1), ())
        self.assertEqual(u.shape, ())
        self.assertTrue(0.0 < float(u) < 1.0)

    def test_open_interval(self):
        for dtype in (np.float32, np.float64):
            u = rng_lib.uniform(RngState.from_seed(2), (100_000,), dtype)
            self.assertEqual(u.dtype, dtype)
            self.assertTrue(np.all(u > 0) and np.all(u < 1))

    def test_ks(self):
        passes = sum(
            stats.kstest(rng_lib.uniform(RngState.from_seed(s), (N,)), 'uniform').statistic < KS_THRESHOLD
            for s in SEEDS)
        self.assertGreaterEqual(passes, 2)


class NormalKernelTest(SimpleTestCase):
    """Test Box-Muller normals."""

    def test_box_muller_formula(self):
        z = rng_lib.box_muller(np.array(0.5), np.array(0.25))
        self.assertAlmostEqual(float(z[0]), 0.0, places=15)
        self.assertAlmostEqual(float(z[1]), 1.1774100225154747, places=14)

    def test_mean_bound(self):
        n = 1_000_000
        z = rng_lib.standard_normal(RngState.from_seed(3), (n,))
        self.assertLess(abs(float(np.mean(z))), 4.0 / np.sqrt(n))

    def test_odd_count(self):
        self.assertEqual(rng_lib.standard_normal(RngState.from_seed(3), (3, 3)).shape, (3, 3))

    def test_ks(self):
        passes = sum(
            stats.kstest(rng_lib.standard_normal(RngState.from_seed(s), (N,)), 'norm').statistic < KS_THRESHOLD
            for s in SEEDS)
        self.assertGreaterEqual(passes, 2)


class GammaKernelTest(SimpleTestCase):
    """Test the Marsaglia-Tsang sampler."""

    def test_mean_alpha_two(self):
        n = 1_000_000
        x = rng_lib.standard_gamma(RngState.from_seed(4), 2.0, (n,))
        self.assertLess(abs(float(np.mean(x)) - 2.0), 4.0 * np.sqrt(2.0 / n))

    def test_boost_path_mean(self):
        n = 1_000_000
        x = rng_lib.standard_gamma(RngState.from_seed(4), 0.5, (n,))
        self.assertLess(abs(float(np.mean(x)) - 0.5), 4.0 * np.sqrt(0.5 / n))
        self.assertTrue(np.all(x > 0))

    def test_alpha_one_is_exponential(self):
        passes = sum(
            stats.kstest(rng_lib.standard_gamma(RngState.from_seed(s), 1.0, (N,)), 'expon').statistic
            < KS_THRESHOLD
            for s in SEEDS)
        self.assertGreaterEqual(passes, 2)

    def test_batched_concentration(self):
        x = rng_lib.standard_gamma(RngState.from_seed(6), np.array([0.5, 3.0]), (1000, 2))
        self.assertEqual(x.shape, (1000, 2))

    def test_invalid_concentration(self):
        with self.assertRaises(InvalidParameter):
            rng_lib.standard_gamma(RngState.from_seed(1), -1.0, (2,), validate_args=True)


class PoissonKernelTest(SimpleTestCase):
    """Test the Knuth and PTRS Poisson samplers."""

    def test_integer_dtype(self):
        self.assertEqual(rng_lib.standard_poisson(RngState.from_seed(1), 4.0, (5,)).dtype, np.int64)

    def test_mean_rate_four(self):
        n = 1_000_000
        x = rng_lib.standard_poisson(RngState.from_seed(7), 4.0, (n,))
        self.assertLess(abs(float(np.mean(x)) - 4.0), 4.0 * np.sqrt(4.0 / n))

    def test_zero_frequency(self):
        n = 1_000_000
        p = np.exp(-0.5)
        x = rng_lib.standard_poisson(RngState.from_seed(8), 0.5, (n,))
        self.assertLess(abs(float(np.mean(x == 0)) - p), 4.0 * np.sqrt(p * (1 - p) / n))

    def test_large_rate(self):
        n = 200_000
        x = rng_lib.standard_poisson(RngState.from_seed(9), 40.0, (n,))
        self.assertLess(abs(float(np.mean(x)) - 40.0), 4.0 * np.sqrt(40.0 / n))
        self.assertLess(abs(float(np.var(x)) / 40.0 - 1.0), 0.02)

    def test_deterministic(self):
        a = rng_lib.standard_poisson(RngState.from_seed(10), [2.0, 30.0], (50, 2))
        b = rng_lib.standard_poisson(RngState.from_seed(10), [2.0, 30.0], (50, 2))
        assert_array_equal(a, b)

    def test_invalid_rate(self):
        with self.assertRaises(InvalidParameter):
            rng_lib.standard_poisson(RngState.from_seed(1), 0.0, validate_args=True)
