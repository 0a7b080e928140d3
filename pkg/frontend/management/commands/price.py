from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from common.exceptions import PricingError
from frontend.config import dump_run_config, load_run_config
from frontend.pricing import price_run, price_table, write_csv
from frontend.serializers import PriceRequestSerializer


class Command(BaseCommand):
    help = 'Price a strike batch from a YAML run config and write strike, put, call, valid, backend as CSV'

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            type=str,
            required=True,
            help='Path to the YAML run config',
        )
        parser.add_argument(
            '--out',
            type=str,
            help='Output CSV path (default: <COSNUFFT_OUTPUT_DIR>/prices.csv)',
        )
        parser.add_argument(
            '--backend',
            choices=['direct', 'nufft'],
            help='Override cos.backend',
        )
        parser.add_argument(
            '--formula',
            choices=['classic', 'alt'],
            help='Override cos.formula',
        )
        parser.add_argument(
            '--tolerance',
            type=float,
            help='Override cos.tolerance',
        )
        parser.add_argument(
            '--threads',
            type=int,
            help='Worker threads for the pricer',
        )
        parser.add_argument(
            '--dump-config',
            type=str,
            help='Also write the fully resolved config to this path',
        )

    def handle(self, *args, **options):
        try:
            run = load_run_config(options['config'], serializer_class=PriceRequestSerializer)
            run = run.with_overrides(
                backend=options.get('backend'),
                formula=options.get('formula'),
                tolerance=options.get('tolerance'),
            )
            prices = price_run(run, threads=options.get('threads'))
        except PricingError as exc:
            raise CommandError(str(exc)) from exc

        out = Path(options.get('out') or Path(settings.COSNUFFT_OUTPUT_DIR) / 'prices.csv')
        out.parent.mkdir(parents=True, exist_ok=True)
        write_csv(price_table(prices), out)
        if options.get('dump_config'):
            dump_run_config(run, options['dump_config'])

        if len(prices) and not prices.valid.any():
            raise CommandError(f'All {len(prices)} strikes fall outside the truncation range; see {out}')
        flagged = len(prices) - int(prices.valid.sum())
        if flagged:
            self.stdout.write(self.style.WARNING(f'{flagged} strike(s) flagged invalid'))
        self.stdout.write(self.style.SUCCESS(
            f'Priced {len(prices)} strikes on {prices.backend.value} -> {out}'
        ))
