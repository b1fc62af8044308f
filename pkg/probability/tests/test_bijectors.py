"""
Tests for bijectors, their combinators and the preimage cache.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.test import SimpleTestCase, override_settings
from numpy.testing import assert_allclose, assert_array_equal

from probability import rng as rng_lib
from probability.bijectors import (
    AbsValue, Affine, Chain, Exp, Identity, Invert, LinearAutoregressiveFn, MaskedAutoregressive,
    Permute, PreimageSet, Reshape, Sigmoid, SoftmaxCentered, Softplus, Square,
)
from probability.exceptions import (
    DependenceViolation, DomainError, DTypeError, InvalidParameter, NotInvertible, ShapeError,
)
from probability.numcore import freeze
from probability.rng import RngState


def numerical_log_det(fn, x, h=1e-6):
    """log|det J| of ``fn`` at a single vector ``x`` by central differences."""
    x = np.asarray(x, dtype=float)
    columns = []
    for j in range(x.size):
        step = np.zeros_like(x)
        step[j] = h
        columns.append((np.asarray(fn(x + step)) - np.asarray(fn(x - step))) / (2 * h))
    return np.linalg.slogdet(np.stack(columns, axis=-1))[1]


class ElementwiseBijectorTest(SimpleTestCase):
    """Test the scalar bijectors."""

    def test_round_trips(self):
        x = np.linspace(-3., 3., 7)
        for bijector in (Identity(), Exp(), Sigmoid(), Softplus()):
            with self.subTest(bijector=bijector.name):
                y = bijector.forward(x)
                assert_allclose(bijector.inverse(np.array(y)), x, rtol=1e-10, atol=1e-12)

    def test_log_det_matches_derivative(self):
        x = np.array([-2., 0.3, 1.7])
        h = 1e-6
        for bijector in (Exp(), Sigmoid(), Softplus()):
            with self.subTest(bijector=bijector.name):
                derivative = (np.asarray(bijector.forward(x + h)) - np.asarray(bijector.forward(x - h))) / (2 * h)
                assert_allclose(bijector.forward_log_det_jacobian(np.array(x)), np.log(derivative), rtol=1e-6)

    def test_inverse_log_det_is_negated(self):
        y = np.array([0.2, 0.5, 0.9])
        bijector = Sigmoid()
        x = bijector.inverse(np.array(y))
        assert_allclose(bijector.inverse_log_det_jacobian(y), -bijector.forward_log_det_jacobian(x), rtol=1e-10)

    def test_event_ndims_reduces(self):
        x = np.ones((2, 3))
        self.assertEqual(Exp().forward_log_det_jacobian(x).shape, (2, 3))
        assert_allclose(Exp().forward_log_det_jacobian(x, event_ndims=1), [3., 3.])

    def test_inverse_range_checked(self):
        with self.assertRaises(DomainError):
            Exp(validate_args=True).inverse(np.array([-1.]))
        with self.assertRaises(DomainError):
            Sigmoid(validate_args=True).inverse(np.array([1.5]))

    def test_outputs_are_read_only(self):
        y = Exp().forward(np.zeros(3))
        self.assertFalse(y.flags.writeable)

    def test_dtype_is_enforced(self):
        with self.assertRaises(DTypeError):
            Affine(shift=1., dtype=np.float32).forward(np.zeros(2))


class CoveringTest(SimpleTestCase):
    """Test the AbsValue and Square coverings."""

    def test_abs_value_preimages(self):
        preimages = AbsValue().inverse(np.array(2.))
        self.assertIsInstance(preimages, PreimageSet)
        self.assertEqual(len(preimages), 2)
        assert_array_equal(preimages.branches[0], -2.)
        assert_array_equal(preimages.branches[1], 2.)

    def test_abs_value_fold_point(self):
        """Test the preimage of 0 is {0} while both branches stay available."""
        bijector = AbsValue()
        preimages = bijector.inverse(np.array(0.))
        self.assertEqual(len(preimages), 1)
        assert_array_equal(preimages.branches[0], 0.)
        self.assertEqual(len(bijector.inverse_branches(np.array(0.))), 2)
        self.assertEqual(len(bijector.inverse_log_det_jacobian(np.array(0.))), 2)

    def test_inverse_branches_needs_a_covering(self):
        with self.assertRaises(NotInvertible):
            Exp().inverse_branches(np.array(1.))

    def test_abs_value_log_det(self):
        ildj = AbsValue().inverse_log_det_jacobian(np.array([1., 2.]))
        self.assertEqual(len(ildj), 2)
        assert_array_equal(ildj[0], [0., 0.])

    def test_square_preimages(self):
        negative, positive = Square().inverse(np.array([4., 9.]))
        assert_allclose(negative, [-2., -3.])
        assert_allclose(positive, [2., 3.])

    def test_square_log_det(self):
        for ildj in Square().inverse_log_det_jacobian(np.array(4.)):
            assert_allclose(ildj, -np.log(4.), rtol=1e-12)

    def test_square_negative_input(self):
        with self.assertRaises(DomainError):
            Square().inverse(np.array([-1.]))

    def test_coverings_cannot_be_inverted(self):
        with self.assertRaises(NotInvertible):
            Invert(AbsValue())
        with self.assertRaises(NotInvertible):
            Chain([Square()])


class AffineTest(SimpleTestCase):
    """Test the Affine scale operators."""

    def test_scale_diag(self):
        bijector = Affine(shift=[1., -1.], scale_diag=[2., 4.])
        x = np.array([1., 1.])
        assert_allclose(bijector.forward(x), [3., 3.])
        assert_allclose(bijector.forward_log_det_jacobian(x), np.log(8.), rtol=1e-12)

    def test_scale_tril(self):
        bijector = Affine(scale_tril=[[2., 0.], [1., 3.]])
        x = np.array([1., 1.])
        y = bijector.forward(x)
        assert_allclose(y, [2., 4.])
        assert_allclose(bijector.forward_log_det_jacobian(x), np.log(6.), rtol=1e-12)
        assert_allclose(bijector.inverse(np.array(y)), x, rtol=1e-12)

    def test_tril_log_det_matches_numerical(self):
        bijector = Affine(shift=[0.5, 0.], scale_tril=[[2., 0.], [1., 3.]])
        x = np.array([0.2, -0.7])
        assert_allclose(bijector.forward_log_det_jacobian(x), numerical_log_det(bijector.forward, x), rtol=1e-6)

    def test_identity_multiplier(self):
        bijector = Affine(scale_identity_multiplier=2.)
        x = np.zeros(3)
        assert_allclose(bijector.forward_log_det_jacobian(x), np.full(3, np.log(2.)))
        assert_allclose(bijector.forward_log_det_jacobian(x, event_ndims=1), 3 * np.log(2.))

    def test_one_scale_operator(self):
        with self.assertRaises(InvalidParameter):
            Affine(scale_diag=[1.], scale_tril=[[1.]])

    def test_zero_diagonal(self):
        with self.assertRaises(InvalidParameter):
            Affine(scale_diag=[1., 0.], validate_args=True)

    def test_event_size_checked(self):
        with self.assertRaises(ShapeError):
            Affine(scale_diag=[1., 2.]).forward_event_shape([3])


class StructuralBijectorTest(SimpleTestCase):
    """Test Permute, Reshape and SoftmaxCentered."""

    def test_softmax_centered_at_origin(self):
        bijector = SoftmaxCentered()
        assert_allclose(bijector.forward(np.array([0.])), [.5, .5])
        assert_allclose(bijector.forward_log_det_jacobian(np.array([0.])), np.log(.25), rtol=1e-12)

    def test_softmax_centered_round_trip(self):
        x = np.array([[0.3, -1.2], [2.0, 0.1]])
        y = SoftmaxCentered().forward(x)
        assert_allclose(y.sum(axis=-1), 1.0)
        assert_allclose(SoftmaxCentered().inverse(np.array(y)), x, rtol=1e-10)

    def test_softmax_centered_log_det(self):
        bijector = SoftmaxCentered()
        x = np.array([0.3, -1.2])
        expected = numerical_log_det(lambda v: np.asarray(bijector.forward(v))[:-1], x)
        assert_allclose(bijector.forward_log_det_jacobian(x), expected, rtol=1e-6)

    def test_softmax_centered_shapes(self):
        self.assertEqual(SoftmaxCentered().forward_event_shape([2]), (3,))
        self.assertEqual(SoftmaxCentered().inverse_event_shape([3]), (2,))

    def test_permute(self):
        bijector = Permute([2, 0, 1])
        x = np.array([10., 20., 30.])
        assert_array_equal(bijector.forward(x), [30., 10., 20.])
        assert_array_equal(bijector.inverse(np.array([30., 10., 20.])), x)
        assert_allclose(bijector.forward_log_det_jacobian(x), 0.)

    def test_bad_permutation(self):
        with self.assertRaises(InvalidParameter):
            Permute([0, 0, 1])

    def test_reshape(self):
        bijector = Reshape(event_shape_out=[2, 2], event_shape_in=[4])
        y = bijector.forward(np.arange(8.).reshape(2, 4))
        self.assertEqual(y.shape, (2, 2, 2))
        self.assertEqual(bijector.inverse(np.array(y)).shape, (2, 4))
        self.assertEqual(bijector.forward_event_shape([4]), (2, 2))

    def test_reshape_size_mismatch(self):
        with self.assertRaises(ShapeError):
            Reshape(event_shape_out=[3], event_shape_in=[4])


class CombinatorTest(SimpleTestCase):
    """Test Chain and Invert."""

    def test_chain_applies_right_to_left(self):
        chain = Chain([Exp(), Affine(shift=1.)])
        assert_allclose(chain.forward(np.array(0.)), np.e, rtol=1e-12)

    def test_chain_log_det_sums(self):
        chain = Chain([Exp(), Affine(scale_identity_multiplier=2.)])
        x = np.array([0.1, 0.5])
        assert_allclose(chain.forward_log_det_jacobian(x), np.log(2.) + 2 * x, rtol=1e-12)
        y = chain.forward(x)
        assert_allclose(chain.inverse(np.array(y)), x, rtol=1e-12)

    def test_empty_chain_is_identity(self):
        chain = Chain([])
        x = np.array([1., 2.])
        assert_array_equal(chain.forward(x), x)
        assert_array_equal(chain.forward_log_det_jacobian(x), [0., 0.])

    def test_chain_event_ranks(self):
        chain = Chain([Affine(scale_diag=[1., 2.]), Exp()])
        self.assertEqual(chain.forward_min_event_ndims, 1)
        self.assertFalse(chain.is_elementwise)

    def test_double_inversion(self):
        x = np.array([-1., 0., 2.])
        assert_allclose(Invert(Invert(Sigmoid())).forward(x), Sigmoid().forward(x), rtol=1e-12)

    def test_invert_swaps_directions(self):
        inverted = Invert(Exp())
        assert_allclose(inverted.forward(np.array([1.])), [0.], atol=1e-15)
        assert_allclose(inverted.forward_log_det_jacobian(np.array([2.])), [-np.log(2.)])

    def test_invert_counts_through(self):
        inner = Exp()
        inverted = Invert(inner)
        inverted.forward(np.array([1.]))
        self.assertEqual(inverted.forward_kernel_calls, 1)
        self.assertEqual(inner.inverse_kernel_calls, 1)


class CacheTest(SimpleTestCase):
    """Test the identity-keyed preimage cache."""

    def test_inverse_of_output_is_cached(self):
        bijector = Exp()
        x = freeze(np.array([0., 1.]))
        y = bijector.forward(x)
        self.assertIs(bijector.inverse(y), x)
        self.assertEqual(bijector.forward_kernel_calls, 1)
        self.assertEqual(bijector.inverse_kernel_calls, 0)

    def test_repeated_forward_is_cached(self):
        bijector = Exp()
        x = freeze(np.array([0., 1.]))
        self.assertIs(bijector.forward(x), bijector.forward(x))
        self.assertEqual(bijector.forward_kernel_calls, 1)

    def test_equal_copy_misses(self):
        bijector = Exp()
        y = bijector.forward(np.array([0., 1.]))
        bijector.inverse(np.array(y))
        self.assertEqual(bijector.inverse_kernel_calls, 1)

    def test_cache_token(self):
        bijector = Exp()
        x = freeze(np.array([0.]))
        y = bijector.forward(x)
        self.assertEqual(bijector.cache_token(x), bijector.cache_token(y))
        self.assertIsNone(bijector.cache_token(np.array([0.])))

    def test_mutated_input_is_recomputed(self):
        """Test a writable input edited in place never hits a stale entry."""
        bijector = Exp()
        x = np.array([0.])
        y = bijector.forward(x)
        x[0] = 1.
        assert_allclose(bijector.forward(x), [np.e], rtol=1e-15)
        self.assertEqual(bijector.forward_kernel_calls, 2)
        # the preimage stored for y is the value x had when y was made
        assert_array_equal(bijector.inverse(y), [0.])
        self.assertEqual(bijector.inverse_kernel_calls, 0)

    def test_mutated_output_is_recomputed(self):
        bijector = Exp()
        x = freeze(np.array([0.]))
        y = np.array(bijector.forward(x))
        bijector.inverse(y)
        y[0] = np.e
        assert_allclose(bijector.inverse(y), [1.], rtol=1e-15)
        self.assertEqual(bijector.inverse_kernel_calls, 2)

    def test_outputs_do_not_view_writable_inputs(self):
        x = np.array([1., 2.])
        y = Identity().forward(x)
        x[0] = 5.
        assert_array_equal(y, [1., 2.])
        self.assertFalse(y.flags.writeable)

    def test_concurrent_forward(self):
        """Test threads sharing one input see one consistent entry and exact counts."""
        bijector = Exp()
        x = freeze(np.linspace(-1., 1., 5))
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(lambda _: bijector.forward(x), range(64)))
        for y in results:
            assert_array_equal(y, np.exp(x))
        self.assertGreaterEqual(bijector.forward_kernel_calls, 1)
        self.assertLessEqual(bijector.forward_kernel_calls, 8)
        self.assertIs(bijector.forward(x), bijector.forward(x))
        self.assertEqual(bijector.inverse_kernel_calls, 0)

    def test_concurrent_kernel_calls_are_counted(self):
        bijector = Exp()
        with ThreadPoolExecutor(max_workers=8) as pool:
            list(pool.map(lambda i: bijector.forward(np.array([float(i)])), range(200)))
        self.assertEqual(bijector.forward_kernel_calls, 200)

    @override_settings(DISTKIT_CACHE=False)
    def test_cache_disabled(self):
        bijector = Exp()
        x = freeze(np.array([0., 1.]))
        y = bijector.forward(x)
        recovered = bijector.inverse(y)
        self.assertIsNot(recovered, x)
        assert_allclose(recovered, x)
        self.assertEqual(bijector.inverse_kernel_calls, 1)

    @override_settings(DISTKIT_CACHE_SIZE=2)
    def test_least_recently_used_entry_evicted(self):
        bijector = Exp()
        xs = [freeze(np.array(float(i))) for i in range(3)]
        ys = [bijector.forward(x) for x in xs]
        self.assertIs(bijector.inverse(ys[2]), xs[2])
        self.assertEqual(bijector.inverse_kernel_calls, 0)
        recovered = bijector.inverse(ys[0])
        self.assertIsNot(recovered, xs[0])
        assert_allclose(recovered, xs[0], atol=1e-15)
        self.assertEqual(bijector.inverse_kernel_calls, 1)

    def test_reset_counters(self):
        bijector = Exp()
        bijector.forward(np.zeros(1))
        bijector.reset_counters()
        self.assertEqual(bijector.forward_kernel_calls, 0)

class MaskedAutoregressiveTest(SimpleTestCase):
    """Test the masked autoregressive bijector."""

    def setUp(self):
        self.fn = LinearAutoregressiveFn.random(4, RngState.from_seed(0))
        self.x = rng_lib.standard_normal(RngState.from_seed(1), (5, 4))

    def test_round_trip(self):
        bijector = MaskedAutoregressive(self.fn)
        y = bijector.forward(self.x)
        assert_allclose(bijector.inverse(np.array(y)), self.x, rtol=1e-9, atol=1e-10)

    def test_inverse_calls_fn_per_element(self):
        calls = []

        def counted(x):
            calls.append(1)
            return self.fn(x)

        bijector = MaskedAutoregressive(counted)
        bijector.inverse(np.zeros((2, 4)))
        self.assertEqual(len(calls), 4)

    def test_log_det_matches_numerical(self):
        bijector = MaskedAutoregressive(self.fn)
        x = self.x[0]
        assert_allclose(bijector.forward_log_det_jacobian(x), numerical_log_det(bijector.forward, x), rtol=1e-6)

    def test_upper_triangle_is_masked(self):
        fn = LinearAutoregressiveFn(np.ones((3, 3)), np.zeros((3, 3)))
        assert_array_equal(fn.shift_weights, np.tril(np.ones((3, 3)), -1))

    def test_log_scale_is_clamped(self):
        fn = LinearAutoregressiveFn(np.zeros((2, 2)), np.zeros((2, 2)), log_scale_bias=[100., -100.], clamp=3.)
        _, log_scale = fn(np.zeros(2))
        self.assertTrue(np.all(np.abs(log_scale) <= 3.))
        assert_allclose(log_scale, [3., -3.])

    def test_dependence_audit(self):
        def reversed_fn(x):
            return x[..., ::-1] * 1.0, np.zeros_like(x)

        bijector = MaskedAutoregressive(reversed_fn, validate_args=True)
        with self.assertRaises(DependenceViolation):
            bijector.forward(np.arange(4.))

    def test_dependence_audit_passes(self):
        MaskedAutoregressive(self.fn).audit_dependence(self.x)
