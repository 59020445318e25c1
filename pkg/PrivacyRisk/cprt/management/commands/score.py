from django.core.management.base import CommandError

from ...scoring import counts_from_attributes, severity_score
from ..base import INPUT_ERROR, CPRTCommand, csv_list


class Command(CPRTCommand):
    help = 'Severity score for per-level attribute counts or a list of present attribute ids.'

    def add_command_arguments(self, parser):
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument('--counts', help='Per-level counts c1,c2,c3,c4, e.g. 2,10,5,4')
        group.add_argument('--attrs', help='Comma-separated present attribute ids, e.g. biometrics,age')
        parser.add_argument('--json', action='store_true', help='Full-precision JSON output')

    def run(self, **options):
        registry = self.registry(options)
        if options['counts']:
            try:
                counts = [int(c) for c in csv_list(options['counts'])]
            except ValueError:
                raise CommandError(f"--counts must be four integers, got {options['counts']!r}", returncode=INPUT_ERROR)
        else:
            counts = counts_from_attributes(csv_list(options['attrs']), registry)

        score = severity_score(counts, registry)
        if options['json']:
            self.emit_json(score.to_dict())
        else:
            self.stdout.write(f"{score.value:.3f} {score.label}")
