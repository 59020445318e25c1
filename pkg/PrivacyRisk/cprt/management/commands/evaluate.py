from pathlib import Path

from django.conf import settings

from ...dataset_io import load_ground_truth, load_predictions, write_confusion_csv, write_report
from ...pipelines import run_evaluation
from ..base import CPRTCommand, positive_int


class Command(CPRTCommand):
    help = (
        'Evaluate predicted scores against ground truth. Raw responses are parsed from a JSON "score" '
        'field (also inside a fenced code block), else the first decimal literal in [0, 1].'
    )

    def add_command_arguments(self, parser):
        parser.add_argument('--ground-truth', required=True, help='Ground-truth JSONL')
        parser.add_argument('--predictions', required=True, help='Predictions JSONL: {image_id, score} or {image_id, raw_response}')
        parser.add_argument('--output', required=True, help='Metrics report JSON to write')
        parser.add_argument('--confusion-csv', help='Confusion matrix CSV (default: report path with .csv suffix)')
        parser.add_argument('--seed', type=int, default=settings.CPRT_SEED, help='Seed for pair sampling')
        parser.add_argument('--max-pairs', type=positive_int, default=settings.CPRT_MAX_PAIRS, help='Pair budget per pair mode')
        parser.add_argument('--threads', type=positive_int, default=settings.CPRT_THREADS, help='Workers for response parsing')

    def run(self, **options):
        registry = self.registry(options)
        ground_truth = load_ground_truth(self.require_file(options['ground_truth'], '--ground-truth'), registry)
        predictions = load_predictions(self.require_file(options['predictions'], '--predictions'))

        report = run_evaluation(
            ground_truth,
            predictions,
            registry,
            seed=options['seed'],
            max_pairs=options['max_pairs'],
            threads=options['threads'],
            boundary_source=self.boundary_source(options),
        )
        write_report(report, options['output'])
        confusion_path = options['confusion_csv'] or str(Path(options['output']).with_suffix('.csv'))
        write_confusion_csv(report, confusion_path)

        self.stdout.write(f"n={report.n} seed={options['seed']}")
        for name in ('pearson', 'spearman', 'mae', 'bias', 'level_accuracy', 'inter_acc', 'intra_acc'):
            value = getattr(report, name)
            self.stdout.write(f"{name}: {'null' if value is None else f'{value:.4f}'}")
