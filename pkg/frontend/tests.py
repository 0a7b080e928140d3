import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import pandas as pd
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from django.urls import reverse
from rest_framework import status
from rest_framework.test import APISimpleTestCase

from common.exceptions import ConfigError
from cosrange.truncation import model_range
from nufftpricer.pricer import price_batch

from .config import dump_run_config, parse_run_config
from .pricing import price_run

VG_CONFIG = """\
version: 1
model:
  name: vg
  params:
    theta: -0.1436
    nu: {nu}
    sigma: 0.12136
market:
  spot: 100
  rate: 0.1
  dividend: 0.0
maturity: 1.0
cos:
  L: 10
  M: 128
  formula: classic
  backend: nufft
  tolerance: 1.0e-9
strikes:
  min: 60
  max: 140
  count: 25
"""

BS_CONFIG = """\
version: 1
model: {name: bs, params: {sigma: 0.2}}
market: {forward: 100, discount: 1.0}
maturity: 1.0
strikes: [80, 100, 120]
"""

BS_REQUEST = {
    'model': {'name': 'bs', 'params': {'sigma': 0.2}},
    'market': {'forward': 100.0, 'discount': 1.0},
    'maturity': 1.0,
    'cos': {'L': 8, 'M': 256, 'backend': 'nufft', 'tolerance': 1e-12},
}


class RunConfigTestCase(SimpleTestCase):
    """Test cases for YAML run configs."""

    def test_parse_valid_config(self):
        run = parse_run_config(VG_CONFIG.format(nu=0.3))
        self.assertEqual(run.model.name, 'vg')
        self.assertEqual(run.M, 128)
        self.assertEqual(run.backend, 'nufft')
        self.assertAlmostEqual(run.market.forward, 100.0 * np.exp(0.1))
        self.assertAlmostEqual(run.market.discount, np.exp(-0.1))
        self.assertEqual(run.strike_values().shape, (25,))

    def test_cos_section_defaults(self):
        run = parse_run_config(BS_CONFIG)
        self.assertEqual(run.M, settings.COS_DEFAULT_M)
        self.assertEqual(run.L, settings.COS_DEFAULT_L)
        self.assertEqual(run.formula, 'classic')
        self.assertEqual(run.market.forward, 100.0)
        np.testing.assert_array_equal(run.strike_values(), [80.0, 100.0, 120.0])

    def test_model_error_points_at_its_line(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_run_config(VG_CONFIG.format(nu=0), source='vg.yaml')
        self.assertEqual(ctx.exception.line, 6)
        self.assertEqual(ctx.exception.field, 'nu')
        self.assertTrue(str(ctx.exception).startswith('line 6: vg.yaml: model.params.nu'))

    def test_unknown_model_parameter(self):
        text = VG_CONFIG.format(nu=0.3).replace('    sigma: 0.12136', '    sigma: 0.12136\n    kappa: 1.0')
        with self.assertRaises(ConfigError) as ctx:
            parse_run_config(text)
        self.assertEqual(ctx.exception.field, 'kappa')

    def test_both_market_parameterizations(self):
        text = BS_CONFIG.replace('{forward: 100, discount: 1.0}', '{forward: 100, discount: 1.0, spot: 100}')
        with self.assertRaises(ConfigError) as ctx:
            parse_run_config(text)
        self.assertEqual(ctx.exception.line, 3)
        self.assertEqual(ctx.exception.field, 'market')

    def test_malformed_yaml(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_run_config("version: 1\nmodel: {name: bs\nmaturity: 1.0\n")
        self.assertIsNotNone(ctx.exception.line)
        self.assertIn('invalid YAML', str(ctx.exception))

    def test_unsupported_version(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_run_config(BS_CONFIG.replace('version: 1', 'version: 2'))
        self.assertEqual(ctx.exception.line, 1)
        self.assertEqual(ctx.exception.field, 'version')

    def test_non_positive_strike(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_run_config(BS_CONFIG.replace('[80, 100, 120]', '[80, -1, 120]'))
        self.assertIn('strikes', str(ctx.exception))

    def test_dumped_config_reproduces_prices(self):
        run = parse_run_config(VG_CONFIG.format(nu=0.3))
        reloaded = parse_run_config(dump_run_config(run))
        self.assertEqual(reloaded.market.forward, run.market.forward)
        np.testing.assert_array_equal(price_run(reloaded).puts, price_run(run).puts)

    def test_overrides(self):
        run = parse_run_config(BS_CONFIG).with_overrides(backend='direct', tolerance=None)
        self.assertEqual(run.backend, 'direct')
        self.assertEqual(run.tolerance, settings.NUFFT_DEFAULT_TOLERANCE)


class ManagementCommandTestCase(SimpleTestCase):
    """The price, density and bench commands."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def write_config(self, text, name='run.yaml'):
        path = self.dir / name
        path.write_text(text)
        return str(path)

    def test_price_writes_csv(self):
        config = self.write_config(BS_CONFIG)
        out = self.dir / 'prices.csv'
        stdout = StringIO()
        call_command('price', '--config', config, '--out', str(out), stdout=stdout)
        table = pd.read_csv(out, float_precision='round_trip')
        self.assertEqual(list(table.columns), ['strike', 'put', 'call', 'valid', 'backend'])
        atm = table[table['strike'] == 100.0].iloc[0]
        self.assertEqual(atm['put'], atm['call'])

        run = parse_run_config(BS_CONFIG)
        trange = model_range(run.model, run.maturity, run.L, run.M)
        expected = price_batch(
            run.model, run.market, trange, run.strike_values(),
            tolerance=run.tolerance, threads=settings.PRICING_THREADS,
            direct_crossover=settings.NUFFT_DIRECT_CROSSOVER,
        )
        np.testing.assert_array_equal(table['put'].to_numpy(), expected.puts)
        self.assertIn('Priced 3 strikes', stdout.getvalue())

    def test_price_backend_override_and_dump(self):
        config = self.write_config(BS_CONFIG)
        dumped = self.dir / 'effective.yaml'
        out = self.dir / 'prices.csv'
        call_command(
            'price', '--config', config, '--out', str(out), '--backend', 'direct',
            '--dump-config', str(dumped), stdout=StringIO(),
        )
        self.assertTrue((pd.read_csv(out)['backend'] == 'classic').all())
        self.assertIn('backend: direct', dumped.read_text())

    def test_price_invalid_parameter(self):
        config = self.write_config(VG_CONFIG.format(nu=0))
        with self.assertRaises(CommandError) as ctx:
            call_command('price', '--config', config, '--out', str(self.dir / 'p.csv'), stdout=StringIO())
        self.assertIn('nu', str(ctx.exception))
        self.assertIn('line 6', str(ctx.exception))

    def test_price_all_strikes_outside_range(self):
        config = self.write_config(BS_CONFIG.replace('[80, 100, 120]', '[1000000, 2000000]'))
        out = self.dir / 'prices.csv'
        with self.assertRaises(CommandError):
            call_command('price', '--config', config, '--out', str(out), stdout=StringIO())
        self.assertFalse(pd.read_csv(out)['valid'].any())

    def test_price_missing_config(self):
        with self.assertRaises(CommandError):
            call_command('price', '--config', str(self.dir / 'absent.yaml'), stdout=StringIO())

    def test_density_empty_points(self):
        config = self.write_config(BS_CONFIG)
        out = self.dir / 'density.csv'
        call_command('density', '--config', config, '--points', '', '--out', str(out), stdout=StringIO())
        self.assertEqual(out.read_text(), 'x,density,valid,backend\n')

    def test_density_grid(self):
        config = self.write_config(BS_CONFIG)
        out = self.dir / 'density.csv'
        call_command('density', '--config', config, '--points=-0.5:0.5:11', '--out', str(out), stdout=StringIO())
        table = pd.read_csv(out)
        self.assertEqual(len(table), 11)
        self.assertTrue(table['valid'].all())
        self.assertTrue((table['density'] > 0).all())

    def test_density_bad_points(self):
        config = self.write_config(BS_CONFIG)
        with self.assertRaises(CommandError):
            call_command('density', '--config', config, '--points', '1:2', stdout=StringIO())

    def test_bench_list(self):
        stdout = StringIO()
        call_command('bench', '--list', stdout=stdout)
        self.assertIn('vg4', stdout.getvalue())
        self.assertIn('suite published', stdout.getvalue())

    def test_bench_unknown_case(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('bench', '--cases', 'nope', stdout=StringIO())
        self.assertIn('nope', str(ctx.exception))

    def test_bench_small_run(self):
        out = self.dir / 'bench'
        call_command('bench', '--cases', 'bs', '--strikes', '10', '--out', str(out), stdout=StringIO())
        self.assertEqual(len(pd.read_csv(out / 'accuracy.csv')), 4)
        self.assertEqual(len(pd.read_csv(out / 'throughput.csv')), 4)
        self.assertTrue((out / 'report.json').exists())


class PricingApiTestCase(APISimpleTestCase):
    """REST endpoints for pricing, density and the case registry."""

    def test_price(self):
        response = self.client.post(
            reverse('pricing-price'), {**BS_REQUEST, 'strikes': [90.0, 100.0, 1e6]}, format='json',
        )
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['backend'], 'nufft')
        self.assertEqual(response.data['count'], 3)
        self.assertEqual(response.data['invalid'], 1)
        self.assertIsNone(response.data['results'][2]['put'])
        self.assertAlmostEqual(response.data['results'][1]['put'], response.data['results'][1]['call'])

    def test_price_requires_strikes(self):
        response = self.client.post(reverse('pricing-price'), BS_REQUEST, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('strikes', response.data)

    def test_price_invalid_parameter(self):
        request = {**BS_REQUEST, 'model': {'name': 'bs', 'params': {'sigma': -0.2}}, 'strikes': [100.0]}
        response = self.client.post(reverse('pricing-price'), request, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('sigma', response.data['model']['params'])

    def test_density(self):
        request = {**BS_REQUEST, 'points': {'min': -0.4, 'max': 0.4, 'count': 5}}
        response = self.client.post(reverse('pricing-density'), request, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['count'], 5)
        self.assertEqual(response.data['invalid'], 0)

    def test_bench_cases(self):
        response = self.client.get(reverse('bench-cases'))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        names = [case['name'] for case in response.data['cases']]
        self.assertIn('heston256', names)
        self.assertIn('published', response.data['suites'])
