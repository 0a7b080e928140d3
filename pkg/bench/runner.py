"""Accuracy and throughput runs over the benchmark cases."""
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings

from charfn.params import BlackScholesParams
from common.exceptions import ParameterError, PricingError, ReferenceFailure
from cosclassic.batches import Backend, StrikeBatch
from cosclassic.pricer import (
    black_scholes_put,
    price_puts_classic,
    price_puts_classic_alt,
    shifted_charfn,
)
from cosrange.truncation import model_range
from nufftpricer.pricer import price_batch, price_puts_nufft
from nufftpricer.spectral import assemble_alt, assemble_classic

logger = logging.getLogger(__name__)

ASSEMBLY_MODES = ('excluded', 'included', 'both')
# Shortest timed sample before the inner loop is repeated.
MIN_SAMPLE_SECONDS = 2e-3
MAX_INNER_LOOP = 1 << 12
# Larger self-references go through a strict-tolerance transform.
REFERENCE_DIRECT_MAX_TERMS = 1 << 14
REFERENCE_FORMULAS = ('classic', 'alt')


@dataclass
class BenchResult:
    case: str
    accuracy: list = field(default_factory=list)
    throughput: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    @property
    def accuracy_passed(self):
        return all(row['passed'] is not False for row in self.accuracy)


def _setting(name, default):
    return getattr(settings, name, default)


def reference_prices(case, strikes, formula=None):
    """Reference put prices for ``strikes`` according to ``case.reference``.

    ``formula`` overrides the COS formula of a self reference.
    """
    market = case.market()
    source = case.reference
    formula = formula or source.formula
    if source.kind == 'self' and formula not in REFERENCE_FORMULAS:
        raise ReferenceFailure(f"{case.name}: reference formula must be classic or alt, got {formula!r}")
    try:
        if source.kind == 'closed_form':
            if not isinstance(case.model, BlackScholesParams):
                raise ReferenceFailure(f"{case.name}: closed-form reference needs the bs model")
            puts = black_scholes_put(market, strikes, case.model.sigma)
        else:
            ref_M, ref_L = source.resolved()
            trange = model_range(case.model, market.maturity, ref_L, ref_M)
            batch = StrikeBatch.build(strikes, market, trange)
            if ref_M > REFERENCE_DIRECT_MAX_TERMS:
                assemble = assemble_classic if formula == 'classic' else assemble_alt
                coeffs = assemble(case.model, market, trange)
                puts = price_puts_nufft(
                    coeffs, market, batch,
                    tolerance=_setting('NUFFT_STRICT_TOLERANCE', 1e-16),
                ).puts
            else:
                price = price_puts_classic if formula == 'classic' else price_puts_classic_alt
                puts = price(case.model, market, trange, batch).puts
    except ReferenceFailure:
        raise
    except PricingError as exc:
        logger.error(f"Reference for {case.name} failed: {exc}")
        raise ReferenceFailure(f"{case.name}: {exc}") from exc
    puts = np.asarray(puts, dtype=np.float64)
    if not np.all(np.isfinite(puts)):
        bad = int(np.count_nonzero(~np.isfinite(puts)))
        raise ReferenceFailure(
            f"{case.name}: {source.kind} reference "
            f"is not finite at {bad} of {puts.size} strikes"
        )
    return puts


def error_metrics(approx, reference):
    """RMSE, maximum and mean absolute error over finite entries."""
    diff = np.asarray(approx, dtype=np.float64) - np.asarray(reference, dtype=np.float64)
    diff = diff[np.isfinite(diff)]
    if diff.size == 0:
        return {'rmse': math.nan, 'max_abs_error': math.nan, 'mean_abs_error': math.nan}
    abs_diff = np.abs(diff)
    return {
        'rmse': float(np.sqrt(np.mean(diff * diff))),
        'max_abs_error': float(abs_diff.max()),
        'mean_abs_error': float(abs_diff.mean()),
    }


def _within(value, band):
    return band[0] <= value <= band[1]


def _verdict(verdicts):
    if not verdicts:
        return None
    return all(verdicts)


def check_thresholds(metrics, thresholds):
    """``None`` when the case asserts nothing, otherwise whether every upper bound holds."""
    verdicts = [
        metrics[key] <= bound
        for key, bound in (
            ('max_abs_error', thresholds.max_abs_error),
            ('rmse', thresholds.rmse),
            ('mean_abs_error', thresholds.mean_abs_error),
        )
        if bound is not None
    ]
    return _verdict(verdicts)


def published_match(metrics, claim):
    """Whether the measured errors reproduce the published figures; ``None`` without a claim."""
    verdicts = []
    if claim.max_abs_error is not None:
        verdicts.append(metrics['max_abs_error'] <= claim.max_abs_error)
    if claim.rmse_band is not None:
        verdicts.append(_within(metrics['rmse'], claim.rmse_band))
    if claim.mean_abs_band is not None:
        verdicts.append(_within(metrics['mean_abs_error'], claim.mean_abs_band))
    return _verdict(verdicts)


def _reference_label(source, formula):
    if source.kind == 'closed_form':
        return source.kind
    return f"{source.kind}:{formula}"


def run_accuracy(case, strike_count=None, spacing=None, threads=1, backends=None):
    """Errors of every backend against the case reference on one strike grid."""
    count = strike_count or max(case.strike_counts)
    strikes = case.strikes(count, spacing)
    market = case.market()
    logger.info(f"Accuracy run for {case.name}: {count} strikes, M={case.M}, L={case.L}")
    references = {}
    trange = model_range(case.model, market.maturity, case.L, case.M)
    batch = StrikeBatch.build(strikes, market, trange)

    rows = []
    for formula, backend in backends or case.backends:
        prices = price_batch(
            case.model, market, trange, batch, formula=formula, backend=backend,
            tolerance=case.tolerance, threads=threads,
        )
        reference_formula = formula if case.reference.formula == 'match' else case.reference.formula
        if reference_formula not in references:
            references[reference_formula] = reference_prices(case, strikes, reference_formula)
        metrics = error_metrics(prices.puts, references[reference_formula])
        passed = check_thresholds(metrics, case.thresholds)
        matched = published_match(metrics, case.published)
        if matched is False:
            logger.info(f"{case.name}/{prices.backend.value} does not reproduce the published errors: {metrics}")
        if passed is False:
            logger.warning(f"{case.name}/{prices.backend.value} misses its accuracy threshold: {metrics}")
        rows.append({
            'case': case.name,
            'backend': prices.backend.value,
            'strikes': count,
            'M': case.M,
            'L': case.L,
            'tolerance': case.tolerance,
            'reference': _reference_label(case.reference, reference_formula),
            'invalid_strikes': int(np.count_nonzero(~prices.valid)),
            **metrics,
            'passed': passed,
            'published_match': matched,
        })
    return BenchResult(case=case.name, accuracy=rows)


def _pricing_call(case, market, trange, batch, selected, assembly, tolerance, threads):
    """Zero-argument callable pricing ``batch`` on ``selected``; assembly optionally hoisted."""
    model = case.model
    if selected in (Backend.CLASSIC, Backend.CLASSIC_ALT):
        price = price_puts_classic if selected is Backend.CLASSIC else price_puts_classic_alt
        if assembly == 'included':
            return lambda: price(model, market, trange, batch, threads=threads)
        shifted = shifted_charfn(model, market.maturity, trange)
        return lambda: price(model, market, trange, batch, threads=threads, shifted=shifted)

    assemble = assemble_classic if selected is Backend.NUFFT else assemble_alt

    def priced(coeffs):
        return price_puts_nufft(coeffs, market, batch, tolerance=tolerance, threads=threads)

    if assembly == 'included':
        return lambda: priced(assemble(model, market, trange))
    coeffs = assemble(model, market, trange)
    return lambda: priced(coeffs)


def time_call(func, warmups, repetitions):
    """Median seconds per call after ``warmups``, with an automatic inner loop.

    Returns ``(median, samples, multiplier)``; each sample is the mean over
    ``multiplier`` back-to-back calls.
    """
    for _ in range(warmups):
        func()
    start = time.perf_counter()
    func()
    single = time.perf_counter() - start
    multiplier = 1
    if single < MIN_SAMPLE_SECONDS:
        multiplier = min(MAX_INNER_LOOP, math.ceil(MIN_SAMPLE_SECONDS / max(single, 1e-9)))
    samples = []
    for _ in range(repetitions):
        start = time.perf_counter()
        for _ in range(multiplier):
            func()
        samples.append((time.perf_counter() - start) / multiplier)
    return float(np.median(samples)), samples, multiplier


def run_throughput(case, strike_counts=None, assembly='excluded', warmups=None,
                   repetitions=None, threads=1, seed=None, spacing=None, backends=None):
    """Options per second for every backend and strike count."""
    if assembly not in ASSEMBLY_MODES:
        raise ParameterError('assembly', f"expected one of {', '.join(ASSEMBLY_MODES)}, got {assembly!r}")
    warmups = max(3, warmups if warmups is not None else _setting('BENCH_WARMUPS', 3))
    repetitions = max(20, repetitions if repetitions is not None else _setting('BENCH_REPETITIONS', 20))
    modes = ('excluded', 'included') if assembly == 'both' else (assembly,)
    backends = list(backends or case.backends)
    if seed is not None:
        order = np.random.default_rng(seed).permutation(len(backends))
        backends = [backends[i] for i in order]

    market = case.market()
    trange = model_range(case.model, market.maturity, case.L, case.M)
    rows = []
    for count in strike_counts or case.strike_counts:
        batch = StrikeBatch.build(case.strikes(count, spacing), market, trange)
        for formula, backend in backends:
            selected = Backend.select(formula, backend)
            for mode in modes:
                call = _pricing_call(case, market, trange, batch, selected, mode, case.tolerance, threads)
                median, samples, multiplier = time_call(call, warmups, repetitions)
                if multiplier > 1:
                    logger.debug(f"{case.name}/{selected.value}/J={count}: inner loop x{multiplier}")
                rows.append({
                    'case': case.name,
                    'backend': selected.value,
                    'assembly': mode,
                    'threads': threads,
                    'strikes': count,
                    'warmups': warmups,
                    'repetitions': repetitions,
                    'multiplier': multiplier,
                    'median_seconds': median,
                    'min_seconds': float(min(samples)),
                    'max_seconds': float(max(samples)),
                    'options_per_second': count / median if median > 0 else math.inf,
                    'samples': samples,
                })
        logger.info(f"Throughput for {case.name} at J={count} done")
    result = BenchResult(case=case.name, throughput=rows)
    result.checks = throughput_checks(case, rows)
    return result


def _rate(rows, backend, count, assembly):
    for row in rows:
        if (row['backend'], row['strikes'], row['assembly']) == (backend, count, assembly):
            return row['options_per_second']
    return None


def throughput_checks(case, rows):
    """Ordinal throughput claims evaluated on measured rates; informational only."""
    checks = []

    def add(name, fast, slow, count, assembly, factor):
        fast_rate = _rate(rows, fast, count, assembly)
        slow_rate = _rate(rows, slow, count, assembly)
        if fast_rate is None or slow_rate is None:
            return
        ratio = fast_rate / slow_rate
        passed = ratio >= factor
        checks.append({
            'case': case.name,
            'check': name,
            'assembly': assembly,
            'ratio': ratio,
            'bound': factor,
            'passed': bool(passed),
        })

    for assembly in sorted({row['assembly'] for row in rows}):
        if case.M == 1024:
            add('nufft_speedup_J500', 'nufft', 'classic', 500, assembly, 2.0)
            add('nufft_speedup_J2500', 'nufft', 'classic', 2500, assembly, 5.0)
        classic_2500 = _rate(rows, 'classic', 2500, assembly)
        classic_500 = _rate(rows, 'classic', 500, assembly)
        if classic_2500 is not None and classic_500 is not None:
            ratio = classic_2500 / classic_500
            checks.append({
                'case': case.name,
                'check': 'classic_plateau',
                'assembly': assembly,
                'ratio': ratio,
                'bound': 1.5,
                'passed': bool(ratio <= 1.5),
            })
        if case.M == 128:
            add('classic_faster_J10', 'classic', 'nufft', 10, assembly, 1.0)
    for check in checks:
        if not check['passed']:
            logger.info(f"Throughput check {check['check']} not met for {case.name}: ratio {check['ratio']:.3g}")
    return checks


def run_case(case, strike_counts=None, assembly='excluded', threads=1, seed=None,
             spacing=None, warmups=None, repetitions=None, throughput=True):
    """Accuracy at the largest strike count, then throughput over all counts."""
    counts = tuple(strike_counts or case.strike_counts)
    result = run_accuracy(case, strike_count=max(counts), spacing=spacing, threads=threads)
    if throughput:
        timed = run_throughput(
            case, strike_counts=counts, assembly=assembly, warmups=warmups,
            repetitions=repetitions, threads=threads, seed=seed, spacing=spacing,
        )
        result.throughput = timed.throughput
        result.checks = timed.checks
    return result
