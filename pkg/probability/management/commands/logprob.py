"""
Management command to score NDJSON records under a model spec.
"""
from django.core.management.base import BaseCommand

from probability.management.errors import translate_errors
from probability.services import dump_record, load_model, read_records, score_records


class Command(BaseCommand):
    help = 'Compute log densities of NDJSON records under a model spec'

    def add_arguments(self, parser):
        parser.add_argument('--model', required=True, help='Path to the model spec (JSON)')
        parser.add_argument('--data', required=True, help='NDJSON records with "value" and "shape"')
        parser.add_argument('--out', default=None, help='Output NDJSON path (default: stdout)')
        parser.add_argument('--precision', choices=['f32', 'f64'], default=None)

    def handle(self, *args, **options):
        with translate_errors():
            dist = load_model(options['model'], options['precision'])
            results = score_records(dist, read_records(options['data']), options['out'])
        if options['out'] is None:
            for record in results:
                self.stdout.write(dump_record(record))
        else:
            self.stdout.write(self.style.SUCCESS(f'Scored {len(results)} records into {options["out"]}'))
