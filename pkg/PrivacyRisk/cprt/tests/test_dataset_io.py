import csv
import json
import os
import tempfile

from django.test import SimpleTestCase

from cprt.dataset_io import (
    Prediction,
    build_ground_truth,
    join_records,
    load_annotations,
    load_ground_truth,
    load_predictions,
    load_report,
    parse_model_response,
    resolve_predictions,
    write_confusion_csv,
    write_ground_truth,
    write_report,
)
from cprt.exceptions import (
    BadLabelValueError,
    DuplicateIdError,
    EmptyInputError,
    MissingAnnotatorError,
    ModeMismatchError,
    NoScoreFoundError,
    OutOfRangeError,
    ParseError,
    UnknownAttributeError,
)
from cprt.metrics import MetricsReport, evaluate
from cprt.taxonomy import CANONICAL_BOUNDARIES

from .factories import annotation, canonical_registry, image_record, noisy_predictions, random_ground_truth, write_jsonl


class AnnotationFileTests(SimpleTestCase):
    def setUp(self):
        self.registry = canonical_registry()
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, rows):
        return write_jsonl(self.tmp.name, 'annotations.jsonl', rows)

    def test_well_formed_file(self):
        path = self.write([
            {'image_id': 'img1', 'annotator_id': 'a', 'labels': {'biometrics': 1, 'age': 0.5}},
            {'image_id': 'img1', 'annotator_id': 'b', 'labels': {'biometrics': 1}, 'rationale': {'biometrics': 'face'}},
        ])
        records = load_annotations(path, self.registry)
        self.assertEqual(len(records), 2)
        self.assertEqual(records[0].labels[self.registry.index_of('age')], 0.5)
        self.assertEqual(records[1].labels[self.registry.index_of('age')], 0.0)
        self.assertEqual(records[1].rationale, {'biometrics': 'face'})

    def test_bad_label_value(self):
        path = self.write([
            {'image_id': 'img1', 'annotator_id': 'a', 'labels': {'age': 1}},
            {'image_id': 'img1', 'annotator_id': 'b', 'labels': {'age': 0.7}},
        ])
        with self.assertRaises(BadLabelValueError) as ctx:
            load_annotations(path, self.registry)
        self.assertEqual(ctx.exception.line, 2)

    def test_unknown_attribute(self):
        path = self.write([{'image_id': 'img1', 'annotator_id': 'a', 'labels': {'shoe_size': 1}}])
        with self.assertRaises(UnknownAttributeError) as ctx:
            load_annotations(path, self.registry)
        self.assertEqual(ctx.exception.line, 1)
        self.assertEqual(ctx.exception.attribute_id, 'shoe_size')

    def test_malformed_json(self):
        path = os.path.join(self.tmp.name, 'broken.jsonl')
        with open(path, 'w') as f:
            f.write('{"image_id": "img1", "annotator_id": "a", "labels": {}}\n{not json\n')
        with self.assertRaises(ParseError) as ctx:
            load_annotations(path, self.registry)
        self.assertEqual(ctx.exception.line, 2)

    def test_missing_field(self):
        path = self.write([{'image_id': 'img1', 'labels': {}}])
        with self.assertRaises(ParseError):
            load_annotations(path, self.registry)

    def test_duplicate_annotation(self):
        row = {'image_id': 'img1', 'annotator_id': 'a', 'labels': {}}
        with self.assertRaises(ParseError) as ctx:
            load_annotations(self.write([row, row]), self.registry)
        self.assertEqual(ctx.exception.line, 2)

    def test_blank_lines_are_skipped(self):
        path = os.path.join(self.tmp.name, 'gaps.jsonl')
        with open(path, 'w') as f:
            f.write('\n{"image_id": "img1", "annotator_id": "a", "labels": {}}\n\n')
        self.assertEqual(len(load_annotations(path, self.registry)), 1)


class GroundTruthTests(SimpleTestCase):
    def setUp(self):
        self.registry = canonical_registry()

    def test_dual_agreement_on_biometrics(self):
        """Both annotators marking only biometrics lands on the level-1 lower edge"""
        records = build_ground_truth([
            annotation(self.registry, 'img1', 'a', {'biometrics': 1, 'age': 0.5}),
            annotation(self.registry, 'img1', 'b', {'biometrics': 1, 'age': 1}),
        ], self.registry)
        self.assertEqual(len(records), 1)
        self.assertEqual(records[0].gt_score, 0.711)
        self.assertEqual(records[0].gt_level, 1)
        self.assertEqual(records[0].attribute_ids(self.registry), ['biometrics'])

    def test_dual_full_conflict(self):
        """Disagreement everywhere merges to nothing"""
        first = {aid: 1 for aid in self.registry.ids}
        records = build_ground_truth([
            annotation(self.registry, 'img1', 'a', first),
            annotation(self.registry, 'img1', 'b', {}),
        ], self.registry)
        self.assertEqual(records[0].gt_score, 0.0)
        self.assertIsNone(records[0].gt_level)

    def test_dual_needs_two_annotators(self):
        with self.assertRaises(MissingAnnotatorError):
            build_ground_truth([annotation(self.registry, 'img1', 'a')], self.registry)

    def test_dual_rejects_three_annotators(self):
        annotations = [annotation(self.registry, 'img1', name) for name in ('a', 'b', 'c')]
        with self.assertRaises(ModeMismatchError):
            build_ground_truth(annotations, self.registry)

    def test_majority_mode(self):
        annotations = [
            annotation(self.registry, 'img1', 'a', {'location': 1, 'age': 1}),
            annotation(self.registry, 'img1', 'b', {'location': 1}),
            annotation(self.registry, 'img1', 'c', {'age': 0.5}),
        ]
        records = build_ground_truth(annotations, self.registry, mode='majority')
        self.assertEqual(records[0].attribute_ids(self.registry), ['location'])
        self.assertEqual(records[0].gt_score, 0.292)

    def test_unknown_mode(self):
        with self.assertRaises(ModeMismatchError):
            build_ground_truth([], self.registry, mode='union')

    def test_annotator_order_does_not_matter(self):
        annotations = [
            annotation(self.registry, 'img2', 'b', {'gender': 1, 'nudity': 1}),
            annotation(self.registry, 'img1', 'a', {'age': 1}),
            annotation(self.registry, 'img2', 'a', {'gender': 1}),
            annotation(self.registry, 'img1', 'b', {'age': 1}),
        ]
        self.assertEqual(
            build_ground_truth(annotations, self.registry),
            build_ground_truth(list(reversed(annotations)), self.registry),
        )

    def test_write_and_load(self):
        records = random_ground_truth(self.registry, 40, seed=1)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'gt.jsonl')
            write_ground_truth(records, path, self.registry)
            self.assertEqual(load_ground_truth(path, self.registry), records)

    def test_empty_record_set(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'gt.jsonl')
            write_ground_truth([], path, self.registry)
            self.assertEqual(os.path.getsize(path), 0)
            self.assertEqual(load_ground_truth(path, self.registry), [])

    def test_tampered_score(self):
        """Stored scores must match the score recomputed from the attributes"""
        record = image_record(self.registry, 'img1', ['full_legal_name'])
        with tempfile.TemporaryDirectory() as tmp:
            path = write_jsonl(tmp, 'gt.jsonl', [
                {'image_id': 'img1', 'attributes': ['full_legal_name'], 'gt_score': record.gt_score + 0.01, 'gt_level': 2},
            ])
            with self.assertRaises(ParseError) as ctx:
                load_ground_truth(path, self.registry)
        self.assertEqual(ctx.exception.line, 1)

    def test_wrong_level(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_jsonl(tmp, 'gt.jsonl', [
                {'image_id': 'img1', 'attributes': ['age'], 'gt_score': 0.292, 'gt_level': 2},
            ])
            with self.assertRaises(ParseError):
                load_ground_truth(path, self.registry)


class ModelResponseTests(SimpleTestCase):
    def test_structured_score(self):
        self.assertEqual(parse_model_response('{"score": 0.70, "reason": "face visible"}'), 0.70)

    def test_fenced_json(self):
        text = 'Here is my answer:\n```json\n{"score": 0.42}\n```'
        self.assertEqual(parse_model_response(text), 0.42)

    def test_first_decimal_literal(self):
        self.assertEqual(parse_model_response('Severity: 0.85 because faces are visible'), 0.85)
        self.assertEqual(parse_model_response('Level L1 content, score .9'), 0.9)

    def test_skips_out_of_range_literals(self):
        self.assertEqual(parse_model_response('Out of 10 people, risk 0.3'), 0.3)

    def test_only_out_of_range_literals(self):
        with self.assertRaises(OutOfRangeError) as ctx:
            parse_model_response('I rate this 7 out of 10')
        self.assertEqual(ctx.exception.value, 7.0)

    def test_structured_score_out_of_range(self):
        with self.assertRaises(OutOfRangeError):
            parse_model_response('{"score": 1.5}')

    def test_no_score(self):
        with self.assertRaises(NoScoreFoundError):
            parse_model_response('the image is risky')
        with self.assertRaises(NoScoreFoundError):
            parse_model_response('   ')


class PredictionFileTests(SimpleTestCase):
    def setUp(self):
        self.registry = canonical_registry()
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_scores_and_raw_responses(self):
        path = write_jsonl(self.tmp.name, 'pred.jsonl', [
            {'image_id': 'img1', 'score': 0.4},
            {'image_id': 'img2', 'raw_response': 'I would say 0.75.'},
        ])
        predictions = load_predictions(path)
        self.assertEqual(predictions[0], Prediction('img1', 0.4, None))
        self.assertEqual(resolve_predictions(predictions, threads=2), {'img1': 0.4, 'img2': 0.75})

    def test_out_of_range_score(self):
        path = write_jsonl(self.tmp.name, 'pred.jsonl', [{'image_id': 'img1', 'score': 1.3}])
        with self.assertRaises(OutOfRangeError):
            load_predictions(path)

    def test_needs_score_or_response(self):
        path = write_jsonl(self.tmp.name, 'pred.jsonl', [{'image_id': 'img1'}])
        with self.assertRaises(ParseError):
            load_predictions(path)

    def test_duplicate_prediction(self):
        row = {'image_id': 'img1', 'score': 0.4}
        with self.assertRaises(ParseError):
            load_predictions(write_jsonl(self.tmp.name, 'pred.jsonl', [row, row]))
        with self.assertRaises(DuplicateIdError):
            resolve_predictions([Prediction('img1', 0.1), Prediction('img1', 0.2)])

    def test_join_records(self):
        gt = [image_record(self.registry, 'img1', ['age']), image_record(self.registry, 'img2', [])]
        records = join_records(gt, {'img1': 0.3, 'img3': 0.9})
        self.assertEqual([r.image_id for r in records], ['img1'])
        with self.assertRaises(EmptyInputError):
            join_records(gt, {'img3': 0.9})

    def test_join_records_lists_unmatched_ids(self):
        """Skipped ground truth and orphan predictions are named in the warnings"""
        gt = [image_record(self.registry, 'img1', ['age']), image_record(self.registry, 'img2', [])]
        with self.assertLogs('cprt.dataset_io', level='WARNING') as logs:
            join_records(gt, {'img1': 0.3, 'img9': 0.9, 'img3': 0.1})
        self.assertIn('1 ground-truth image(s) have no prediction and were skipped: img2', logs.output[0])
        self.assertIn('2 prediction(s) have no ground-truth record and were ignored: img3, img9', logs.output[1])

    def test_unmatched_id_listing_is_truncated(self):
        gt = [image_record(self.registry, f"img{i:02d}", ['age']) for i in range(25)]
        with self.assertLogs('cprt.dataset_io', level='WARNING') as logs:
            join_records(gt, {'img00': 0.3})
        self.assertIn('img01, img02', logs.output[0])
        self.assertTrue(logs.output[0].endswith('img20, ... (4 more)'))


class ReportFileTests(SimpleTestCase):
    def setUp(self):
        registry = canonical_registry()
        ground_truth = random_ground_truth(registry, 60, seed=6)
        scores = noisy_predictions(ground_truth, seed=6)
        self.report = evaluate(
            join_records(ground_truth, scores), CANONICAL_BOUNDARIES, max_pairs=200
        )

    def test_report_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'report.json')
            write_report(self.report, path)
            self.assertEqual(load_report(path), self.report)
            with open(path) as f:
                first = f.read()
            write_report(load_report(path), path)
            with open(path) as f:
                self.assertEqual(f.read(), first)

    def test_empty_report(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'report.json')
            write_report(MetricsReport.empty(), path)
            with open(path) as f:
                self.assertEqual(json.load(f)['n'], 0)

    def test_confusion_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'confusion.csv')
            write_confusion_csv(self.report, path)
            with open(path, newline='') as f:
                rows = list(csv.reader(f))
        self.assertEqual(rows[0], ['gt_level', 'pred_L1', 'pred_L2', 'pred_L3', 'pred_L4'])
        self.assertEqual([row[0] for row in rows[1:]], ['L1', 'L2', 'L3', 'L4', 'safe'])
        self.assertEqual(sum(int(v) for row in rows[1:5] for v in row[1:]), self.report.n)
