from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from common.exceptions import PricingError
from frontend.config import load_run_config
from frontend.pricing import density_run, density_table, write_csv
from frontend.serializers import DensityRequestSerializer


def _parse_points(text):
    """``x1,x2,...`` or ``min:max:count``."""
    try:
        if ':' in text:
            low, high, count = text.split(':')
            return {'min': float(low), 'max': float(high), 'count': int(count), 'spacing': 'linear'}
        return [float(value) for value in text.split(',') if value.strip()]
    except ValueError as exc:
        raise CommandError(f'--points: expected "x1,x2,..." or "min:max:count", got {text!r}') from exc


class Command(BaseCommand):
    help = 'Reconstruct the log-return density from a YAML run config and write x, density, valid, backend as CSV'

    def add_arguments(self, parser):
        parser.add_argument('--config', type=str, required=True, help='Path to the YAML run config')
        parser.add_argument(
            '--points',
            type=str,
            help='Evaluation points "x1,x2,..." or "min:max:count"; overrides the config points',
        )
        parser.add_argument('--out', type=str, help='Output CSV path (default: <COSNUFFT_OUTPUT_DIR>/density.csv)')
        parser.add_argument('--backend', choices=['direct', 'nufft'], help='Override cos.backend')
        parser.add_argument('--tolerance', type=float, help='Override cos.tolerance')
        parser.add_argument('--threads', type=int, help='Worker threads for the NUFFT')

    def handle(self, *args, **options):
        points = _parse_points(options['points']) if options.get('points') is not None else None
        try:
            if points is None:
                run = load_run_config(options['config'], serializer_class=DensityRequestSerializer)
            else:
                run = load_run_config(options['config'])
            run = run.with_overrides(
                points=points,
                backend=options.get('backend'),
                tolerance=options.get('tolerance'),
            )
            batch = density_run(run, threads=options.get('threads'))
        except PricingError as exc:
            raise CommandError(str(exc)) from exc

        out = Path(options.get('out') or Path(settings.COSNUFFT_OUTPUT_DIR) / 'density.csv')
        out.parent.mkdir(parents=True, exist_ok=True)
        write_csv(density_table(batch), out)
        flagged = int((~batch.valid).sum())
        if flagged:
            self.stdout.write(self.style.WARNING(f'{flagged} point(s) outside the truncation range'))
        self.stdout.write(self.style.SUCCESS(f'Evaluated the density at {batch.points.size} points -> {out}'))
