"""Run a validated config through the library and tabulate the result."""
import logging

import pandas as pd
from django.conf import settings

from common.formatting import FLOAT_FORMAT
from cosrange.truncation import model_range
from nufftpricer.density import reconstruct_density
from nufftpricer.pricer import price_batch

logger = logging.getLogger(__name__)

PRICE_COLUMNS = ['strike', 'put', 'call', 'valid', 'backend']
DENSITY_COLUMNS = ['x', 'density', 'valid', 'backend']


def price_run(run, threads=None):
    trange = model_range(run.model, run.maturity, run.L, run.M)
    return price_batch(
        run.model, run.market, trange, run.strike_values(),
        formula=run.formula, backend=run.backend, tolerance=run.tolerance,
        threads=threads or settings.PRICING_THREADS,
        direct_crossover=settings.NUFFT_DIRECT_CROSSOVER,
        oversampling=settings.NUFFT_OVERSAMPLING,
    )


def density_run(run, threads=None):
    trange = model_range(run.model, run.maturity, run.L, run.M)
    return reconstruct_density(
        run.model, run.market, trange, run.point_values(),
        backend=run.backend, tolerance=run.tolerance,
        threads=threads or settings.PRICING_THREADS,
        direct_crossover=settings.NUFFT_DIRECT_CROSSOVER,
        oversampling=settings.NUFFT_OVERSAMPLING,
    )


def price_table(prices):
    return pd.DataFrame({
        'strike': prices.strikes,
        'put': prices.puts,
        'call': prices.calls,
        'valid': prices.valid,
        'backend': prices.backend.value,
    }, columns=PRICE_COLUMNS)


def density_table(batch):
    return pd.DataFrame({
        'x': batch.points,
        'density': batch.density,
        'valid': batch.valid,
        'backend': batch.backend,
    }, columns=DENSITY_COLUMNS)


def write_csv(table, path):
    """CSV with 17 significant digits; NaN prints as ``nan``."""
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep='nan', lineterminator='\n')
    logger.info(f"Wrote {len(table)} rows to {path}")


def table_records(table):
    """JSON-safe records: NaN becomes ``None``."""
    return table.astype(object).where(table.notna(), None).to_dict(orient='records')
