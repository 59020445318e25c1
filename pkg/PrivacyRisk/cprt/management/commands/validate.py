from django.core.management.base import CommandError

from ...scoring import check_properties
from ..base import VALIDATION_FAILURE, CPRTCommand


class Command(CPRTCommand):
    help = (
        'Load a taxonomy (checking the lexicographic weight constraint) and score every attribute-count '
        'combination, checking interval containment, strict level dominance, within-level monotonicity, '
        'boundary alignment and bucketize round-trip.'
    )

    def add_command_arguments(self, parser):
        parser.add_argument('--json', action='store_true', help='Print the per-property report as JSON')

    def run(self, **options):
        registry = self.registry(options)
        report = check_properties(registry)

        if options['json']:
            self.emit_json({
                'combinations': report.combinations,
                'passed': report.passed,
                'containment': report.containment,
                'dominance': report.dominance,
                'monotonicity': report.monotonicity,
                'alignment': report.alignment,
                'roundtrip': report.roundtrip,
                'counterexample': report.counterexample,
                'weights': list(registry.weights),
                'slacks': list(registry.slacks),
            })
        if not report.passed:
            raise CommandError(
                f"{report.combinations} combinations, first counterexample: {report.counterexample}",
                returncode=VALIDATION_FAILURE,
            )
        if not options['json']:
            self.stdout.write(f"{report.combinations} combinations, all properties hold")
