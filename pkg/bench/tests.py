import tempfile
from dataclasses import replace
from pathlib import Path
from unittest import mock

import numpy as np
import pytest
from django.test import SimpleTestCase, override_settings

from common.exceptions import ParameterError, ReferenceFailure

from .cases import CASES, SUITES, PublishedClaim, ReferenceSpec, Thresholds, resolve_cases, strike_grid
from .report import ACCURACY_COLUMNS, CHECK_COLUMNS, THROUGHPUT_COLUMNS, emit_report, summary_table
from .runner import (
    BenchResult,
    check_thresholds,
    error_metrics,
    published_match,
    reference_prices,
    run_accuracy,
    run_throughput,
    throughput_checks,
    time_call,
)


def fake_result(name='vg1'):
    accuracy = [
        {
            'case': name, 'backend': backend, 'strikes': 100, 'M': 128, 'L': 10.0,
            'tolerance': 1e-9, 'reference': 'self', 'invalid_strikes': 0,
            'rmse': 1.5e-6 * (index + 1), 'max_abs_error': 3.25e-6 * (index + 1),
            'mean_abs_error': 1e-6, 'passed': True, 'published_match': None,
        }
        for index, backend in enumerate(('classic', 'classic_alt', 'nufft', 'nufft_alt'))
    ]
    throughput = [
        {
            'case': name, 'backend': backend, 'assembly': 'excluded', 'threads': 1, 'strikes': count,
            'warmups': 3, 'repetitions': 20, 'multiplier': 1, 'median_seconds': 0.001 * count,
            'min_seconds': 0.0009 * count, 'max_seconds': 0.0011 * count,
            'options_per_second': 1000.0, 'samples': [0.001 * count] * 20,
        }
        for backend in ('classic', 'classic_alt', 'nufft', 'nufft_alt')
        for count in (10, 100)
    ]
    return BenchResult(case=name, accuracy=accuracy, throughput=throughput)


class CaseRegistryTestCase(SimpleTestCase):
    """Test cases for the benchmark registry."""

    def test_strike_grid(self):
        np.testing.assert_allclose(strike_grid(60.0, 140.0, 5), [60.0, 80.0, 100.0, 120.0, 140.0])
        log = strike_grid(60.0, 140.0, 3, 'log')
        self.assertAlmostEqual(log[1], np.sqrt(60.0 * 140.0))
        self.assertEqual(strike_grid(60.0, 140.0, 0).shape, (0,))
        with self.assertRaises(ParameterError):
            strike_grid(60.0, 140.0, 3, 'cubic')

    def test_registry(self):
        self.assertEqual(set(SUITES['published']), {'vg1', 'vg2', 'vg4', 'vg5', 'heston256', 'heston1024'})
        self.assertEqual(CASES['vg4'].M, 1024)
        self.assertEqual(CASES['vg1'].market().maturity, 1.0)

    def test_resolve_cases(self):
        self.assertEqual([case.name for case in resolve_cases(['vg1', 'bs'])], ['vg1', 'bs'])
        self.assertEqual(len(resolve_cases(suite='published')), 6)
        with self.assertRaises(ParameterError) as ctx:
            resolve_cases(['vg9'])
        self.assertIn('heston256', str(ctx.exception))

    def test_strike_bounds_inside_ranges(self):
        from cosrange.truncation import model_range

        for case in CASES.values():
            market = case.market()
            trange = model_range(case.model, case.maturity, case.L, case.M)
            x = np.log(np.array(case.strike_bounds) / market.forward)
            with self.subTest(case=case.name):
                self.assertTrue(trange.contains(x).all())

    @override_settings(BENCH_HESTON_REFERENCE_M=4096, BENCH_REFERENCE_M=2048, BENCH_REFERENCE_L=12.0)
    def test_reference_sizes_follow_settings(self):
        self.assertEqual(CASES['heston256'].reference.resolved(), (4096, 8.0))
        self.assertEqual(CASES['vg1'].reference.resolved(), (2048, 12.0))


class MetricsTestCase(SimpleTestCase):

    def test_error_metrics(self):
        metrics = error_metrics([1.0, 1.0, 4.0, np.nan], [0.0, 2.0, 2.0, 1.0])
        self.assertAlmostEqual(metrics['rmse'], np.sqrt(2.0))
        self.assertEqual(metrics['max_abs_error'], 2.0)
        self.assertAlmostEqual(metrics['mean_abs_error'], 4.0 / 3.0)

    def test_thresholds(self):
        metrics = {'rmse': 5e-6, 'max_abs_error': 1.2e-5, 'mean_abs_error': 4e-6}
        self.assertIsNone(check_thresholds(metrics, Thresholds()))
        self.assertTrue(check_thresholds(metrics, Thresholds(max_abs_error=1e-4)))
        self.assertFalse(check_thresholds(metrics, Thresholds(max_abs_error=1e-5)))
        self.assertTrue(check_thresholds(metrics, Thresholds(rmse=1.7e-5, mean_abs_error=3.9e-5)))
        self.assertFalse(check_thresholds(metrics, Thresholds(rmse=1.7e-5, mean_abs_error=3e-6)))
        self.assertTrue(check_thresholds(metrics, Thresholds(max_abs_error=1.2e-5)))

    def test_heston_bounds_apply_to_rmse_and_mean_abs(self):
        thresholds = CASES['heston256'].thresholds
        self.assertIsNone(thresholds.max_abs_error)
        # A large maximum error alone does not fail the case.
        metrics = {'rmse': 1e-5, 'max_abs_error': 1e-3, 'mean_abs_error': 2e-5}
        self.assertTrue(check_thresholds(metrics, thresholds))
        metrics['mean_abs_error'] = 5e-5
        self.assertFalse(check_thresholds(metrics, thresholds))

    def test_published_match(self):
        metrics = {'rmse': 5e-6, 'max_abs_error': 1.2e-5, 'mean_abs_error': 4e-6}
        self.assertIsNone(published_match(metrics, PublishedClaim()))
        band = PublishedClaim(rmse_band=(1.9e-6, 1.7e-5), mean_abs_band=(4.4e-6, 3.9e-5))
        self.assertFalse(published_match(metrics, band))
        metrics['mean_abs_error'] = 5e-6
        self.assertTrue(published_match(metrics, band))
        self.assertFalse(published_match(metrics, PublishedClaim(max_abs_error=1e-5)))

    def test_unmatched_published_claims_do_not_fail_a_case(self):
        for name in ('vg2', 'vg5'):
            case = CASES[name]
            metrics = {'rmse': 2e-4, 'max_abs_error': 8.8e-4, 'mean_abs_error': 1e-4}
            with self.subTest(case=name):
                self.assertTrue(check_thresholds(metrics, case.thresholds))
                self.assertFalse(published_match(metrics, case.published))

    def test_accuracy_passed_ignores_unasserted_rows(self):
        result = BenchResult(case='x', accuracy=[{'passed': None}, {'passed': True}])
        self.assertTrue(result.accuracy_passed)
        result.accuracy.append({'passed': False})
        self.assertFalse(result.accuracy_passed)


class RunnerTestCase(SimpleTestCase):
    """Accuracy and timing runs on the fast cases."""

    def test_black_scholes_accuracy(self):
        result = run_accuracy(CASES['bs'], strike_count=100)
        self.assertEqual(len(result.accuracy), 4)
        for row in result.accuracy:
            with self.subTest(backend=row['backend']):
                self.assertTrue(row['passed'])
                self.assertLess(row['max_abs_error'], 1e-9)

    @override_settings(BENCH_REFERENCE_M=4096)
    def test_self_reference_direct_and_transform_agree(self):
        case = CASES['vg1']
        strikes = case.strikes(50)
        direct = reference_prices(case, strikes)
        with mock.patch('bench.runner.REFERENCE_DIRECT_MAX_TERMS', 1024):
            transformed = reference_prices(case, strikes)
        np.testing.assert_allclose(transformed, direct, rtol=0, atol=1e-10)

    @override_settings(BENCH_HESTON_REFERENCE_M=2048)
    def test_heston_rows_use_their_own_formula_as_reference(self):
        result = run_accuracy(CASES['heston256'], strike_count=50)
        labels = {row['backend']: row['reference'] for row in result.accuracy}
        self.assertEqual(labels, {
            'classic': 'self:classic', 'classic_alt': 'self:alt',
            'nufft': 'self:classic', 'nufft_alt': 'self:alt',
        })
        for row in result.accuracy:
            with self.subTest(backend=row['backend']):
                self.assertTrue(row['passed'], row)
                self.assertIsNotNone(row['published_match'])

    @override_settings(BENCH_REFERENCE_M=1024)
    def test_reference_formula_override(self):
        case = CASES['vg1']
        strikes = case.strikes(20)
        classic = reference_prices(case, strikes)
        alt = reference_prices(case, strikes, 'alt')
        np.testing.assert_allclose(alt, classic, rtol=0, atol=1e-8)
        with self.assertRaises(ReferenceFailure):
            reference_prices(replace(case, reference=ReferenceSpec(formula='match')), strikes)

    def test_time_call(self):
        calls = []
        median, samples, multiplier = time_call(lambda: calls.append(1), warmups=3, repetitions=20)
        self.assertEqual(len(samples), 20)
        self.assertGreaterEqual(multiplier, 1)
        self.assertEqual(len(calls), 3 + 1 + 20 * multiplier)
        self.assertGreaterEqual(median, 0.0)

    def test_throughput_rows(self):
        result = run_throughput(CASES['bs'], strike_counts=(10, 25), assembly='both', seed=7)
        self.assertEqual(len(result.throughput), 2 * 4 * 2)
        for row in result.throughput:
            self.assertEqual(row['repetitions'], 20)
            self.assertEqual(len(row['samples']), 20)
            self.assertGreater(row['options_per_second'], 0)
        self.assertEqual({row['assembly'] for row in result.throughput}, {'excluded', 'included'})

    def test_throughput_floors(self):
        result = run_throughput(CASES['bs'], strike_counts=(10,), warmups=0, repetitions=1,
                                backends=(('classic', 'direct'),))
        self.assertEqual(result.throughput[0]['warmups'], 3)
        self.assertEqual(result.throughput[0]['repetitions'], 20)

    def test_unknown_assembly_mode(self):
        with self.assertRaises(ParameterError):
            run_throughput(CASES['bs'], assembly='sometimes')

    def test_ordinal_checks(self):
        rows = [
            {'backend': backend, 'strikes': count, 'assembly': 'excluded', 'options_per_second': rate}
            for backend, count, rate in (
                ('classic', 500, 1e5), ('classic', 2500, 1.1e5),
                ('nufft', 500, 3e5), ('nufft', 2500, 4e5),
            )
        ]
        checks = {check['check']: check for check in throughput_checks(CASES['vg4'], rows)}
        self.assertTrue(checks['nufft_speedup_J500']['passed'])
        self.assertFalse(checks['nufft_speedup_J2500']['passed'])
        self.assertTrue(checks['classic_plateau']['passed'])


@pytest.mark.slow
class AcceptanceTestCase(SimpleTestCase):
    """Accuracy thresholds against high-order references."""

    def _run(self, name, strike_count=2500):
        return run_accuracy(CASES[name], strike_count=strike_count)

    def test_variance_gamma_case_1(self):
        for row in self._run('vg1').accuracy:
            self.assertLess(row['max_abs_error'], 1e-4)

    def test_variance_gamma_case_2(self):
        for row in self._run('vg2').accuracy:
            self.assertLess(row['max_abs_error'], 2e-3)
            self.assertIsNotNone(row['published_match'])

    def test_variance_gamma_case_4(self):
        for row in self._run('vg4').accuracy:
            self.assertLess(row['max_abs_error'], 1e-12)

    def test_variance_gamma_case_5(self):
        for row in self._run('vg5').accuracy:
            self.assertLess(row['max_abs_error'], 2e-3)
            self.assertIsNotNone(row['published_match'])

    def test_heston_error_bounds(self):
        for row in self._run('heston256').accuracy:
            with self.subTest(backend=row['backend']):
                self.assertTrue(row['passed'], row)
                self.assertLessEqual(row['rmse'], 1.7e-5)
                self.assertLessEqual(row['mean_abs_error'], 3.9e-5)


@pytest.mark.slow
class ThroughputAcceptanceTestCase(SimpleTestCase):
    """Ordinal throughput claims measured on this machine."""

    backends = (('classic', 'direct'), ('classic', 'nufft'))

    def _checks(self, name, counts):
        result = run_throughput(CASES[name], strike_counts=counts, backends=self.backends, seed=3)
        return {check['check']: check for check in result.checks}

    def test_transform_wins_for_large_batches(self):
        checks = self._checks('vg2', (500, 2500))
        for name in ('nufft_speedup_J500', 'nufft_speedup_J2500', 'classic_plateau'):
            with self.subTest(check=name):
                self.assertTrue(checks[name]['passed'], checks[name])

    def test_direct_sum_wins_for_small_batches(self):
        check = self._checks('vg1', (10,))['classic_faster_J10']
        self.assertTrue(check['passed'], check)


class ReportTestCase(SimpleTestCase):
    """CSV and JSON report files."""

    def test_empty_results_write_headers(self):
        with tempfile.TemporaryDirectory() as tmp:
            emit_report([], tmp)
            self.assertEqual((Path(tmp) / 'accuracy.csv').read_text(), ','.join(ACCURACY_COLUMNS) + '\n')
            self.assertEqual((Path(tmp) / 'throughput.csv').read_text(), ','.join(THROUGHPUT_COLUMNS) + '\n')
            self.assertEqual((Path(tmp) / 'checks.csv').read_text(), ','.join(CHECK_COLUMNS) + '\n')
            self.assertEqual(
                (Path(tmp) / 'summary.csv').read_text(), 'case,backend,assembly,RMSE,MAE,mean_abs\n'
            )

    def test_single_case_has_one_row_per_backend(self):
        with tempfile.TemporaryDirectory() as tmp:
            emit_report([fake_result()], tmp)
            lines = (Path(tmp) / 'accuracy.csv').read_text().splitlines()
        self.assertEqual(len(lines), 1 + 4)
        self.assertTrue(lines[1].startswith('vg1,classic,100,128,'))

    def test_summary_layout(self):
        table = summary_table([fake_result()])
        self.assertEqual(
            list(table.columns), ['case', 'backend', 'assembly', 'J=10', 'J=100', 'RMSE', 'MAE', 'mean_abs'],
        )
        self.assertEqual(len(table), 4)
        self.assertEqual(table.loc[table['backend'] == 'nufft', 'MAE'].item(), 3.25e-6 * 3)

    def test_reports_are_byte_stable(self):
        results = [fake_result('vg1'), fake_result('vg4')]
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            emit_report(results, first)
            emit_report(results, second)
            for name in ('accuracy.csv', 'throughput.csv', 'summary.csv', 'checks.csv', 'report.json'):
                with self.subTest(name=name):
                    self.assertEqual((Path(first) / name).read_bytes(), (Path(second) / name).read_bytes())
