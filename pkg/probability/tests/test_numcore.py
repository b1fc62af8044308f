"""
Tests for shapes, dtypes and special functions.
"""
import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose
from scipy import integrate, special

from probability import numcore
from probability.exceptions import DomainError, DTypeError, IncompatibleShapes


class BroadcastShapesTest(SimpleTestCase):
    """Test right-aligned shape broadcasting."""

    def test_size_one_expansion(self):
        self.assertEqual(numcore.broadcast_shapes([3], [1]), (3,))

    def test_rank_padding(self):
        self.assertEqual(numcore.broadcast_shapes([2, 1], [3]), (2, 3))

    def test_incompatible(self):
        with self.assertRaises(IncompatibleShapes):
            numcore.broadcast_shapes([2], [3])

    def test_commutative_and_associative(self):
        shapes = [(4, 1, 3), (1, 5, 1), (3,), ()]
        for a in shapes:
            for b in shapes:
                self.assertEqual(numcore.broadcast_shapes(a, b), numcore.broadcast_shapes(b, a))
                for c in shapes:
                    left = numcore.broadcast_shapes(numcore.broadcast_shapes(a, b), c)
                    right = numcore.broadcast_shapes(a, numcore.broadcast_shapes(b, c))
                    self.assertEqual(left, right)

    def test_negative_extent_rejected(self):
        with self.assertRaises(IncompatibleShapes):
            numcore.as_shape([2, -1])


class DTypeTest(SimpleTestCase):
    """Test dtype resolution and conversion."""

    def test_mixed_float_arrays_rejected(self):
        with self.assertRaises(DTypeError):
            numcore.resolve_dtype(np.zeros(2, np.float32), np.zeros(2, np.float64))

    def test_python_scalars_adopt_array_dtype(self):
        self.assertEqual(numcore.resolve_dtype(1.0, [2.0], np.zeros(1, np.float32)), numcore.F32)

    def test_default_is_f64(self):
        self.assertEqual(numcore.resolve_dtype(1.0), numcore.F64)

    def test_as_ndvalue_keeps_identity(self):
        x = np.ones(3)
        self.assertIs(numcore.as_ndvalue(x, numcore.F64), x)

    def test_as_ndvalue_refuses_float_promotion(self):
        with self.assertRaises(DTypeError):
            numcore.as_ndvalue(np.ones(3, np.float32), numcore.F64)

    def test_integers_become_i64(self):
        self.assertEqual(numcore.as_ndvalue([1, 2]).dtype, numcore.I64)

    def test_frozen_views(self):
        base = np.arange(4.)
        self.assertFalse(numcore.is_frozen(base))
        view = numcore.freeze(base[1:])
        self.assertFalse(numcore.is_frozen(view))
        self.assertTrue(numcore.is_frozen(numcore.freeze(np.arange(4.))))
        self.assertTrue(numcore.is_frozen(numcore.freeze(base)[1:]))


class LogSumExpTest(SimpleTestCase):
    """Test the stable log-sum-exp reduction."""

    def test_equal_entries(self):
        self.assertAlmostEqual(float(numcore.log_sum_exp([0.0, 0.0])), np.log(2.0), places=14)

    def test_dominated_term_does_not_overflow(self):
        self.assertEqual(float(numcore.log_sum_exp([-1000.0, 0.0])), 0.0)

    def test_matches_direct_sum(self):
        x = np.linspace(-30.0, 30.0, 61).reshape(3, 20)
        assert_allclose(np.exp(numcore.log_sum_exp(x, axis=-1)), np.sum(np.exp(x), axis=-1), rtol=1e-12)

    def test_mixture_oracle(self):
        a, b = -1.3, 0.7
        expected = np.log(0.2 * np.exp(a) + 0.8 * np.exp(b))
        self.assertAlmostEqual(float(numcore.log_sum_exp([np.log(0.2) + a, np.log(0.8) + b])), expected,
                               places=13)

    def test_axis_out_of_bounds(self):
        with self.assertRaises(IncompatibleShapes):
            numcore.log_sum_exp(np.zeros((2, 3)), axis=2)


class SpecialFunctionTest(SimpleTestCase):
    """Test special functions and their domain contract."""

    def test_lgamma_one(self):
        self.assertEqual(float(numcore.lgamma(1.0)), 0.0)

    def test_erf_zero(self):
        self.assertEqual(float(numcore.erf(0.0)), 0.0)

    def test_reg_inc_gamma_against_quadrature(self):
        value, _ = integrate.quad(lambda t: t * np.exp(-t), 0.0, 2.0)
        self.assertAlmostEqual(float(numcore.reg_inc_gamma(2.0, 2.0)), value, places=12)
        self.assertAlmostEqual(float(numcore.reg_inc_gamma(2.0, 2.0)), 0.5939941502901619, places=12)

    def test_reg_inc_beta(self):
        self.assertAlmostEqual(float(numcore.reg_inc_beta(2.0, 3.0, 0.4)), special.betainc(2.0, 3.0, 0.4),
                               places=14)

    def test_out_of_domain_is_nan(self):
        self.assertTrue(np.isnan(numcore.lgamma(-2.0)))
        self.assertTrue(np.isnan(numcore.reg_inc_beta(2.0, 3.0, 1.5)))

    def test_out_of_domain_raises_when_validating(self):
        with self.assertRaises(DomainError):
            numcore.lgamma(0.0, validate_args=True)
        with self.assertRaises(DomainError):
            numcore.special('log1p', -2.0, validate_args=True)

    def test_unknown_function(self):
        with self.assertRaises(ValueError):
            numcore.special('zeta', 2.0)

    def test_softplus_identity(self):
        x = np.linspace(-30.0, 30.0, 121)
        assert_allclose(numcore.softplus(x) - numcore.softplus(-x), x, atol=1e-12)

    def test_sum_rightmost(self):
        x = np.arange(24.0).reshape(2, 3, 4)
        assert_allclose(numcore.sum_rightmost(x, 2), x.sum(axis=(1, 2)))
        self.assertIs(numcore.sum_rightmost(x, 0), x)
