"""
Management command to run the selfcheck suites.
"""
from django.core.management.base import BaseCommand, CommandError

from probability.management.errors import EXIT_SELFCHECK_FAILED
from probability.tasks import dispatch_selfcheck, run_selfcheck_task


class Command(BaseCommand):
    help = 'Run the sampler, moment, bijector and caching self-check suites'

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, default=None,
                            help='Base seed (defaults to DISTKIT_SELFCHECK_SEEDS)')
        parser.add_argument(
            '--async',
            action='store_true',
            help='Fan the suites out as Celery tasks',
        )

    def handle(self, *args, **options):
        """Run the suites and report."""
        if options['async']:
            self.stdout.write('Dispatching selfcheck suites to Celery...')
            result = dispatch_selfcheck(options['seed'])
            self.stdout.write(self.style.SUCCESS(f'Group started with ID: {result.id}'))
            self.stdout.write('   Use Celery to monitor task progress.')
            return
        self.stdout.write('Running selfcheck suites synchronously...')
        report = run_selfcheck_task(options['seed'])
        for suite in report['suites']:
            if suite['passed']:
                self.stdout.write(self.style.SUCCESS(f'  ok    {suite["name"]} ({suite["checks"]} checks)'))
            else:
                self.stdout.write(self.style.ERROR(f'  FAIL  {suite["name"]}'))
                for failure in suite['failures']:
                    self.stdout.write(f'        {failure}')
        if not report['passed']:
            raise CommandError('Selfcheck failed', returncode=EXIT_SELFCHECK_FAILED)
        self.stdout.write(self.style.SUCCESS('Selfcheck passed'))
