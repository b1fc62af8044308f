"""
Management command to draw samples from a model spec.
"""
from django.core.management.base import BaseCommand

from probability.management.errors import translate_errors
from probability.services import load_model, write_samples


class Command(BaseCommand):
    help = 'Draw N samples from a model spec and write them as NDJSON'

    def add_arguments(self, parser):
        parser.add_argument('--model', required=True, help='Path to the model spec (JSON)')
        parser.add_argument('--n', type=int, required=True, help='Number of draws')
        parser.add_argument('--seed', type=int, default=0, help='Random seed (u64)')
        parser.add_argument('--out', required=True, help='Output NDJSON path')
        parser.add_argument('--precision', choices=['f32', 'f64'], default=None,
                            help='Floating precision (defaults to DISTKIT_DEFAULT_PRECISION)')

    def handle(self, *args, **options):
        with translate_errors():
            dist = load_model(options['model'], options['precision'])
            count = write_samples(dist, options['n'], options['seed'], options['out'])
        self.stdout.write(self.style.SUCCESS(
            f'Wrote {count} samples of batch {list(dist.batch_shape)} event {list(dist.event_shape)} '
            f'to {options["out"]}'))
