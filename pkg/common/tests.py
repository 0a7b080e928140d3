import math

from django.test import SimpleTestCase

from .exceptions import ConfigError, MarketError, ParameterError, PointRangeError, PricingError
from .formatting import FLOAT_FORMAT


class ExceptionTestCase(SimpleTestCase):
    """Test cases for the shared error types."""

    def test_parameter_error_names_field(self):
        error = ParameterError('nu', 'must be > 0, got 0')
        self.assertEqual(error.field, 'nu')
        self.assertEqual(str(error), 'nu: must be > 0, got 0')
        self.assertIsInstance(error, ValueError)
        self.assertIsInstance(error, PricingError)

    def test_market_error_is_parameter_error(self):
        self.assertTrue(issubclass(MarketError, ParameterError))

    def test_point_range_error_keeps_index(self):
        error = PointRangeError(3, 0.5)
        self.assertEqual(error.index, 3)
        self.assertIn('point 3', str(error))

    def test_config_error_line_prefix(self):
        self.assertEqual(str(ConfigError('bad', line=4)), 'line 4: bad')
        self.assertEqual(str(ConfigError('bad')), 'bad')


class FormattingTestCase(SimpleTestCase):

    def test_float_format_round_trips(self):
        self.assertEqual(FLOAT_FORMAT % 0.1, '0.10000000000000001')
        for value in (1 / 3, math.pi * 1e-300, 12.776054123456789, -0.0):
            with self.subTest(value=value):
                self.assertEqual(float(FLOAT_FORMAT % value), value)
