"""CSV and JSON benchmark reports.

Files written to the output directory:

``accuracy.csv``
    one row per case and backend: errors against the case reference, the
    asserted verdict and whether the published error figures were reproduced.
``throughput.csv``
    one row per case, backend, assembly mode and strike count.
``summary.csv``
    case x backend rows with options/second per strike count plus RMSE and MAE,
    the layout of the published throughput tables.
``checks.csv``
    ordinal throughput checks; informational.
``report.json``
    everything above including raw timing samples.
"""
import json
import logging
import math
from pathlib import Path

import pandas as pd

from common.formatting import FLOAT_FORMAT

logger = logging.getLogger(__name__)

ACCURACY_COLUMNS = [
    'case', 'backend', 'strikes', 'M', 'L', 'tolerance', 'reference',
    'invalid_strikes', 'rmse', 'max_abs_error', 'mean_abs_error', 'passed', 'published_match',
]
THROUGHPUT_COLUMNS = [
    'case', 'backend', 'assembly', 'threads', 'strikes', 'warmups', 'repetitions',
    'multiplier', 'median_seconds', 'min_seconds', 'max_seconds', 'options_per_second',
]
CHECK_COLUMNS = ['case', 'check', 'assembly', 'ratio', 'bound', 'passed']
SUMMARY_KEYS = ['case', 'backend', 'assembly']


def _frame(rows, columns):
    return pd.DataFrame([{key: row.get(key) for key in columns} for row in rows], columns=columns)


def summary_table(results):
    """Options/second pivoted over strike counts, joined with the accuracy columns."""
    throughput = _frame([row for result in results for row in result.throughput], THROUGHPUT_COLUMNS)
    accuracy = _frame([row for result in results for row in result.accuracy], ACCURACY_COLUMNS)
    if throughput.empty:
        table = accuracy[['case', 'backend']].assign(assembly=None)
        counts = []
    else:
        table = throughput.pivot_table(
            index=SUMMARY_KEYS, columns='strikes', values='options_per_second', aggfunc='first',
        )
        counts = sorted(table.columns)
        table = table[counts]
        table.columns = [f"J={count}" for count in counts]
        table = table.reset_index()
    errors = accuracy[['case', 'backend', 'rmse', 'max_abs_error', 'mean_abs_error']].rename(
        columns={'max_abs_error': 'MAE', 'rmse': 'RMSE', 'mean_abs_error': 'mean_abs'},
    )
    table = table.merge(errors, on=['case', 'backend'], how='outer')
    columns = SUMMARY_KEYS + [f"J={count}" for count in counts] + ['RMSE', 'MAE', 'mean_abs']
    return table.reindex(columns=columns).sort_values(SUMMARY_KEYS, kind='stable').reset_index(drop=True)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def report_payload(results):
    return {
        'cases': [
            {
                'case': result.case,
                'accuracy_passed': result.accuracy_passed,
                'accuracy': [{key: _json_value(value) for key, value in row.items()} for row in result.accuracy],
                'throughput': [
                    {
                        key: ([_json_value(v) for v in value] if key == 'samples' else _json_value(value))
                        for key, value in row.items()
                    }
                    for row in result.throughput
                ],
                'checks': [{key: _json_value(value) for key, value in row.items()} for row in result.checks],
            }
            for result in results
        ],
        'passed': all(result.accuracy_passed for result in results),
    }


def emit_report(results, out_dir, formats=('csv', 'json')):
    """Write the report files and return their paths; I/O errors propagate unchanged."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if 'csv' in formats:
        tables = {
            'accuracy.csv': _frame([row for r in results for row in r.accuracy], ACCURACY_COLUMNS),
            'throughput.csv': _frame([row for r in results for row in r.throughput], THROUGHPUT_COLUMNS),
            'checks.csv': _frame([row for r in results for row in r.checks], CHECK_COLUMNS),
            'summary.csv': summary_table(results),
        }
        for name, table in tables.items():
            path = out_dir / name
            table.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
            written.append(path)
    if 'json' in formats:
        path = out_dir / 'report.json'
        path.write_text(json.dumps(report_payload(results), indent=2, sort_keys=True) + '\n')
        written.append(path)
    logger.info(f"Wrote {len(written)} report file(s) to {out_dir}")
    return written
