from ...annotation import CONSENSUS, PAIRWISE, agreement_report, compare_to_reference
from ...dataset_io import load_annotations
from ..base import CPRTCommand, csv_list


class Command(CPRTCommand):
    help = (
        'Inter-annotator agreement (percent agreement, pairwise-mean Cohen kappa, per-attribute and '
        'per-level agreement), or a candidate annotator against the majority of a reference group.'
    )

    def add_command_arguments(self, parser):
        parser.add_argument('--annotations', required=True, help='Annotation JSONL, one line per (image, annotator)')
        parser.add_argument(
            '--mode', choices=[PAIRWISE, CONSENSUS], default=PAIRWISE,
            help='pairwise: matches pooled over annotator pairs; consensus: every annotator must match',
        )
        parser.add_argument('--annotators', help='Restrict to these annotator ids (comma-separated)')
        parser.add_argument('--candidate', help='Annotator compared against --reference')
        parser.add_argument('--reference', help='Reference annotator ids (comma-separated)')
        parser.add_argument('--output', help='Write the report JSON here')
        parser.add_argument('--json', action='store_true', help='Print the full report as JSON')

    def run(self, **options):
        registry = self.registry(options)
        records = load_annotations(self.require_file(options['annotations'], '--annotations'), registry)

        if options['candidate']:
            reference = csv_list(options['reference'] or '')
            report = compare_to_reference(records, registry, options['candidate'], reference)
        else:
            annotators = csv_list(options['annotators']) if options['annotators'] else None
            report = agreement_report(records, registry, mode=options['mode'], annotators=annotators)

        if options['output']:
            with open(options['output'], 'w', encoding='utf-8') as f:
                f.write(self.format_json(report.to_dict()))
                f.write('\n')
        if options['json']:
            self.emit_json(report.to_dict())
            return

        kappa = 'null' if report.cohen_kappa is None else f"{report.cohen_kappa:.4f}"
        self.stdout.write(f"items={report.n_items} mode={report.mode}")
        self.stdout.write(f"percent_agreement: {report.percent_agreement:.4f}")
        self.stdout.write(f"cohen_kappa: {kappa}")
        for level, value in report.per_level_agreement.items():
            self.stdout.write(f"{level}: {value:.4f}")
