"""
Management command to sample from a kernel density estimate over a points file.
"""
from django.core.management.base import BaseCommand

from probability.management.errors import translate_errors
from probability.serializers import parse_model_spec
from probability.services import build_model, kde_spec, read_json, resolve_precision, write_samples


class Command(BaseCommand):
    help = 'Build a kernel density estimate over NDJSON points and sample from it'

    def add_arguments(self, parser):
        parser.add_argument('--data', required=True, help='NDJSON points with "value" and "shape"')
        parser.add_argument('--model', default=None,
                            help='Kernel template spec; "@points" marks the parameter taking the points')
        parser.add_argument('--bandwidth', type=float, default=None,
                            help='Scale of the default Gaussian kernel')
        parser.add_argument('--n', type=int, required=True, help='Number of draws')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--out', required=True, help='Output NDJSON path')
        parser.add_argument('--precision', choices=['f32', 'f64'], default=None)

    def handle(self, *args, **options):
        with translate_errors():
            kernel = None
            if options['model']:
                kernel = parse_model_spec(read_json(options['model']), field='kernel', allow_points=True)
            spec = kde_spec(options['data'], kernel, options['bandwidth'])
            dist = build_model(spec, resolve_precision(options['precision']))
            count = write_samples(dist, options['n'], options['seed'], options['out'])
        self.stdout.write(self.style.SUCCESS(
            f'Wrote {count} KDE samples over {dist.components_distribution.batch_shape[-1]} points '
            f'to {options["out"]}'))
