from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from bench.cases import CASES, STRIKE_COUNTS, SUITES, resolve_cases
from bench.report import emit_report
from bench.runner import ASSEMBLY_MODES, run_case
from common.exceptions import PricingError


class Command(BaseCommand):
    help = 'Run accuracy and throughput benchmarks; exits nonzero iff an accuracy threshold fails'

    def add_arguments(self, parser):
        parser.add_argument('--cases', nargs='+', help='Case names to run')
        parser.add_argument('--suite', choices=sorted(SUITES), help='Named group of cases')
        parser.add_argument('--list', action='store_true', help='Print the case registry and exit')
        parser.add_argument(
            '--strikes',
            type=int,
            nargs='+',
            help=f'Strike counts (default: {" ".join(str(count) for count in STRIKE_COUNTS)})',
        )
        parser.add_argument('--log-strikes', action='store_true', help='Log-uniform instead of equidistant strikes')
        parser.add_argument(
            '--assembly',
            choices=ASSEMBLY_MODES,
            default='excluded',
            help='Whether coefficient assembly is inside the timed region',
        )
        parser.add_argument('--threads', type=int, default=1, help='Worker threads inside the pricer')
        parser.add_argument('--seed', type=int, help='Seed for randomizing the backend order')
        parser.add_argument('--warmups', type=int, help='Warm-up runs before timing (at least 3)')
        parser.add_argument('--repetitions', type=int, help='Timed repetitions (at least 20)')
        parser.add_argument('--accuracy-only', action='store_true', help='Skip the throughput runs')
        parser.add_argument('--out', type=str, help='Report directory (default: <COSNUFFT_OUTPUT_DIR>/bench)')

    def handle(self, *args, **options):
        if options['list']:
            for name, case in CASES.items():
                self.stdout.write(f'{name:<12} M={case.M:<6} L={case.L:<5g} {case.description}')
            for name, members in sorted(SUITES.items()):
                self.stdout.write(f'suite {name}: {", ".join(members)}')
            return

        try:
            cases = resolve_cases(options.get('cases'), options.get('suite'))
        except PricingError as exc:
            raise CommandError(str(exc)) from exc

        spacing = 'log' if options['log_strikes'] else None
        results = []
        for case in cases:
            self.stdout.write(f'Running {case.name}: {case.description}')
            try:
                result = run_case(
                    case,
                    strike_counts=options.get('strikes'),
                    assembly=options['assembly'],
                    threads=options['threads'],
                    seed=options.get('seed'),
                    spacing=spacing,
                    warmups=options.get('warmups'),
                    repetitions=options.get('repetitions'),
                    throughput=not options['accuracy_only'],
                )
            except PricingError as exc:
                raise CommandError(f'{case.name}: {exc}') from exc
            results.append(result)
            for row in result.accuracy:
                style = self.style.ERROR if row['passed'] is False else self.style.SUCCESS
                self.stdout.write(style(
                    f"  {row['backend']:<12} rmse={row['rmse']:.3e} max_abs={row['max_abs_error']:.3e} "
                    f"mean_abs={row['mean_abs_error']:.3e} passed={row['passed']}"
                ))
            for check in result.checks:
                style = self.style.SUCCESS if check['passed'] else self.style.WARNING
                self.stdout.write(style(
                    f"  {check['check']} [{check['assembly']}] ratio={check['ratio']:.3g} bound={check['bound']:g}"
                ))

        out = Path(options.get('out') or Path(settings.COSNUFFT_OUTPUT_DIR) / 'bench')
        emit_report(results, out)
        failed = [result.case for result in results if not result.accuracy_passed]
        if failed:
            raise CommandError(f'Accuracy thresholds failed for: {", ".join(failed)} (reports in {out})')
        self.stdout.write(self.style.SUCCESS(f'{len(results)} case(s) passed; reports in {out}'))
