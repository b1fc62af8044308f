"""
Management command to compute KL(p || q) between two model specs.
"""
from django.core.management.base import BaseCommand

from probability.exceptions import ModelSpecError
from probability.management.errors import translate_errors
from probability.services import compute_kl, format_array, load_model


class Command(BaseCommand):
    help = 'Closed-form KL divergence between two model specs, optionally beside a Monte Carlo estimate'

    def add_arguments(self, parser):
        parser.add_argument('--model', action='append', required=True,
                            help='Model spec path; give it twice, p then q')
        parser.add_argument('--mc', type=int, default=None, help='Monte Carlo draws for a cross-check')
        parser.add_argument('--seed', type=int, default=0, help='Random seed for --mc')
        parser.add_argument('--precision', choices=['f32', 'f64'], default=None)

    def handle(self, *args, **options):
        models = options['model']
        with translate_errors():
            if len(models) != 2:
                raise ModelSpecError(f'model: expected exactly two specs, got {len(models)}', field='model')
            p, q = (load_model(path, options['precision']) for path in models)
            result = compute_kl(p, q, options['mc'], options['seed'])
        self.stdout.write(f'kl {format_array(result["kl"])}')
        if 'mc' in result:
            self.stdout.write(f'mc {format_array(result["mc"])}')
            self.stdout.write(f'stderr {format_array(result["stderr"])}')
