import math

import mpmath as mp
import numpy as np
from django.test import SimpleTestCase

from common.exceptions import ParameterError, PointRangeError, SizeMismatchError

from . import kernel
from .plan import execute_type2, index_set, nudft_direct, plan, relative_error, to_fft_layout


def random_problem(seed, N, J):
    rng = np.random.default_rng(seed)
    points = rng.uniform(-0.5, 0.5, J)
    spectrum = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    return points, spectrum


class KernelTestCase(SimpleTestCase):
    """Test cases for the spreading kernel parameters."""

    def test_width_rule(self):
        self.assertEqual(kernel.kernel_width(1e-9, 2.0), 11)
        self.assertEqual(kernel.kernel_width(1e-4, 2.0), 6)
        self.assertEqual(kernel.kernel_width(1e-13, 2.0), 15)

    def test_width_is_clamped(self):
        with self.assertLogs('nufft.kernel', level='WARNING'):
            self.assertEqual(kernel.kernel_width(1e-16, 2.0), kernel.MAX_WIDTH)
        self.assertEqual(kernel.kernel_width(1e-1, 2.0), kernel.MIN_WIDTH)

    def test_beta(self):
        self.assertAlmostEqual(kernel.kernel_beta(10, 2.0), 0.97 * math.pi * 10 * 0.75)

    def test_kernel_support(self):
        values = kernel.evaluate([-1.5, -1.0, 0.0, 0.5, 1.0, 1.01], 20.0)
        self.assertEqual(values[0], 0.0)
        self.assertEqual(values[2], 1.0)
        self.assertAlmostEqual(values[1], math.exp(-20.0))
        self.assertEqual(values[5], 0.0)

    def test_fourier_transform_matches_quadrature(self):
        width, grid_size = 11, 2048
        beta = kernel.kernel_beta(width, 2.0)
        k = np.array([0, 1, 100, 511, 1024])
        values = kernel.fourier_transform(k, width, beta, grid_size)

        def exact(mode):
            integrand = lambda z: mp.exp(beta * (mp.sqrt(1 - z * z) - 1)) * mp.cos(mp.pi * mode * width * z / grid_size)  # noqa: E731
            return 0.5 * width * float(mp.quad(integrand, [-1, 0, 1]))

        for mode, value in zip(k, values):
            with self.subTest(k=mode):
                self.assertAlmostEqual(value / exact(int(mode)), 1.0, places=8)

    def test_fourier_transform_is_even(self):
        k = np.arange(0, 128)
        beta = kernel.kernel_beta(8, 2.0)
        np.testing.assert_array_equal(
            kernel.fourier_transform(k, 8, beta, 256), kernel.fourier_transform(-k, 8, beta, 256)
        )


class LayoutTestCase(SimpleTestCase):

    def test_index_set(self):
        np.testing.assert_array_equal(index_set(8), np.arange(-4, 4))

    def test_fft_layout(self):
        grid = to_fft_layout(np.arange(-2, 2).astype(complex), 8)
        np.testing.assert_array_equal(grid, [0, 1, 0, 0, 0, 0, -2, -1])


class DirectSumTestCase(SimpleTestCase):
    """The exact O(NJ) oracle."""

    def test_single_mode(self):
        spectrum = np.zeros(8, dtype=complex)
        spectrum[5] = 1.0  # k = 1
        values = nudft_direct([0.25, -0.5, 0.0], spectrum)
        np.testing.assert_allclose(values, [-1j, -1.0, 1.0], atol=1e-15)

    def test_matches_naive_sum(self):
        points, spectrum = random_problem(1, 16, 9)
        naive = np.exp(-2j * np.pi * np.outer(points, index_set(16))) @ spectrum
        np.testing.assert_allclose(nudft_direct(points, spectrum), naive, atol=1e-12)

    def test_relative_error(self):
        self.assertEqual(relative_error([1.0, 2.0], [1.0, 2.5], [3.0, 4.0]), 0.1)
        self.assertEqual(relative_error([], [], [0.0]), 0.0)


class PlanTestCase(SimpleTestCase):
    """Test cases for plan construction and type-2 execution."""

    def test_accuracy_contract(self):
        points, spectrum = random_problem(2024, 1024, 2500)
        exact = nudft_direct(points, spectrum)
        for tolerance in (1e-6, 1e-9, 1e-13):
            nufft_plan = plan(points, 1024, tolerance=tolerance)
            self.assertFalse(nufft_plan.direct)
            approx = execute_type2(nufft_plan, spectrum)
            with self.subTest(tolerance=tolerance):
                self.assertLessEqual(relative_error(approx, exact, spectrum), tolerance)

    def test_accuracy_over_sizes_and_seeds(self):
        for seed in (1, 2, 3):
            for N in (128, 1024, 4096):
                for J in (10, 2500):
                    points, spectrum = random_problem(seed, N, J)
                    exact = nudft_direct(points, spectrum)
                    for tolerance in (1e-6, 1e-9, 1e-13):
                        nufft_plan = plan(points, N, tolerance=tolerance, direct_crossover=0)
                        self.assertFalse(nufft_plan.direct)
                        approx = execute_type2(nufft_plan, spectrum)
                        with self.subTest(seed=seed, N=N, J=J, tolerance=tolerance):
                            self.assertLessEqual(relative_error(approx, exact, spectrum), tolerance)

    def test_linearity(self):
        points, f = random_problem(21, 512, 1000)
        _, g = random_problem(22, 512, 1000)
        a, b = 2.0 - 1.0j, 0.5 + 3.0j
        nufft_plan = plan(points, 512, tolerance=1e-10, direct_crossover=0)
        combined = execute_type2(nufft_plan, a * f + b * g)
        separate = a * execute_type2(nufft_plan, f) + b * execute_type2(nufft_plan, g)
        self.assertLessEqual(relative_error(combined, separate, a * f + b * g), 1e-12)

    def test_repeated_execution_is_bit_identical(self):
        points, spectrum = random_problem(31, 1024, 2500)
        first_plan = plan(points, 1024, tolerance=1e-9)
        second_plan = plan(points, 1024, tolerance=1e-9)
        first = execute_type2(first_plan, spectrum)
        np.testing.assert_array_equal(execute_type2(first_plan, spectrum), first)
        np.testing.assert_array_equal(execute_type2(second_plan, spectrum), first)

    def test_conjugate_symmetric_spectrum_gives_real_values(self):
        N = 256
        rng = np.random.default_rng(41)
        points = rng.uniform(-0.5, 0.5, 700)
        positive = rng.standard_normal(N // 2 - 1) + 1j * rng.standard_normal(N // 2 - 1)
        spectrum = np.zeros(N, dtype=np.complex128)
        centre = N // 2
        spectrum[centre] = rng.standard_normal()
        spectrum[centre + 1:] = positive
        spectrum[1:centre] = np.conj(positive[::-1])
        for tolerance in (1e-6, 1e-12):
            nufft_plan = plan(points, N, tolerance=tolerance, direct_crossover=0)
            values = execute_type2(nufft_plan, spectrum)
            with self.subTest(tolerance=tolerance):
                self.assertLessEqual(np.max(np.abs(values.imag)), tolerance * np.linalg.norm(spectrum))

    def test_deconvolution_is_shared_between_plans(self):
        first = plan(random_problem(51, 1024, 300)[0], 1024, tolerance=1e-9)
        second = plan(random_problem(52, 1024, 400)[0], 1024, tolerance=1e-9)
        self.assertIs(first.deconvolution, second.deconvolution)
        self.assertFalse(first.deconvolution.flags.writeable)
        other = plan(random_problem(51, 1024, 300)[0], 1024, tolerance=1e-6)
        self.assertIsNot(other.deconvolution, first.deconvolution)

    def test_plan_is_reusable(self):
        points, first = random_problem(7, 256, 300)
        _, second = random_problem(8, 256, 300)
        nufft_plan = plan(points, 256, tolerance=1e-12)
        for spectrum in (first, second):
            exact = nudft_direct(points, spectrum)
            self.assertLessEqual(relative_error(execute_type2(nufft_plan, spectrum), exact, spectrum), 1e-12)

    def test_points_near_the_boundary(self):
        points = np.array([-0.5, -0.5 + 1e-12, 0.5 - 1e-12, 0.0])
        _, spectrum = random_problem(3, 4096, 1)
        nufft_plan = plan(points, 4096, tolerance=1e-10)
        self.assertFalse(nufft_plan.direct)
        exact = nudft_direct(points, spectrum)
        self.assertLessEqual(relative_error(execute_type2(nufft_plan, spectrum), exact, spectrum), 1e-10)

    def test_small_batches_use_direct_sum(self):
        points, spectrum = random_problem(5, 64, 10)
        nufft_plan = plan(points, 64)
        self.assertTrue(nufft_plan.direct)
        np.testing.assert_array_equal(execute_type2(nufft_plan, spectrum), nudft_direct(points, spectrum))

    def test_plan_does_not_freeze_caller_points(self):
        points = np.linspace(-0.4, 0.4, 5)
        nufft_plan = plan(points, 8)
        points[0] = 0.1
        self.assertEqual(nufft_plan.points[0], -0.4)
        with self.assertRaises(ValueError):
            nufft_plan.points[0] = 0.0

    def test_empty_points(self):
        nufft_plan = plan([], 64)
        self.assertEqual(nufft_plan.J, 0)
        self.assertEqual(execute_type2(nufft_plan, np.ones(64)).shape, (0,))

    def test_grid_is_oversampled_power_of_two(self):
        points, _ = random_problem(6, 1000, 100)
        nufft_plan = plan(points, 1000, tolerance=1e-9)
        self.assertEqual(nufft_plan.grid_size, 2048)
        self.assertEqual(nufft_plan.kernel_width, 11)

    def test_point_outside_rejected(self):
        with self.assertRaises(PointRangeError) as ctx:
            plan([0.1, 0.5], 8)
        self.assertEqual(ctx.exception.index, 1)

    def test_size_mismatch(self):
        nufft_plan = plan([0.1], 8)
        with self.assertRaises(SizeMismatchError):
            execute_type2(nufft_plan, np.ones(10))

    def test_invalid_parameters(self):
        for kwargs, field in (
            ({'N': 7}, 'N'),
            ({'N': 8, 'tolerance': 1e-3}, 'tolerance'),
            ({'N': 8, 'oversampling': 1.5}, 'oversampling'),
        ):
            with self.subTest(field=field):
                with self.assertRaises(ParameterError) as ctx:
                    plan([0.0], **kwargs)
                self.assertEqual(ctx.exception.field, field)
