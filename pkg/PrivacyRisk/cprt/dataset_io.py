"""
Reading and writing the line-delimited record files: annotations, model
predictions, ground truth, plus metric reports.

Ingestion is strict: the first malformed line aborts with its 1-based line
number.
"""
import csv
import json
import logging
import re
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .annotation import AnnotationRecord, majority_vector, merge_dual
from .exceptions import (
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
from .metrics import EvaluationRecord, MetricsReport
from .scoring import counts_from_vector, severity_score
from .serializers import AnnotationLineSerializer, GroundTruthLineSerializer, PredictionLineSerializer

logger = logging.getLogger(__name__)

DUAL = 'dual'
MAJORITY = 'majority'
REPRODUCIBILITY_TOLERANCE = 1e-9

FENCED_BLOCK = re.compile(r'```(?:json)?\s*(.*?)```', re.DOTALL | re.IGNORECASE)
# Decimal literal with optional leading zero, not glued to a word ("L1") or another number.
DECIMAL_LITERAL = re.compile(r'(?<![\w.])-?(?:\d+(?:\.\d+)?|\.\d+)(?![\w])')


@dataclass(frozen=True)
class ImageRecord:
    image_id: str
    merged_attributes: tuple
    gt_score: float
    gt_level: Optional[int]
    source_split: str = ''

    def attribute_ids(self, registry):
        return [aid for aid, present in zip(registry.ids, self.merged_attributes) if present]


@dataclass(frozen=True)
class Prediction:
    image_id: str
    score: Optional[float] = None
    raw_response: Optional[str] = None


def _read_jsonl(path):
    with open(path, 'r', encoding='utf-8') as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(line_no, f"invalid JSON: {e.msg}")
            if not isinstance(data, dict):
                raise ParseError(line_no, "expected a JSON object")
            yield line_no, data


def _flatten(errors):
    if isinstance(errors, dict):
        return '; '.join(f"{key}: {_flatten(value)}" for key, value in errors.items())
    if isinstance(errors, list):
        return '; '.join(_flatten(e) for e in errors)
    return str(errors)


def _validated(serializer_class, data, line_no):
    serializer = serializer_class(data=data)
    if serializer.is_valid():
        return serializer.validated_data
    errors = serializer.errors
    if 'labels' in errors:
        raise BadLabelValueError(line_no, _flatten(errors['labels']))
    raise ParseError(line_no, _flatten(errors))


def _write_jsonl(rows, path):
    with open(path, 'w', encoding='utf-8') as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True))
            f.write('\n')


def load_annotations(path, registry):
    """One record per (image, annotator); attributes missing from a line are labelled 0."""
    records = []
    seen = set()
    for line_no, data in _read_jsonl(path):
        fields = _validated(AnnotationLineSerializer, data, line_no)
        for attribute_id in fields['labels']:
            if attribute_id not in registry:
                raise UnknownAttributeError(line_no, attribute_id)

        key = (fields['image_id'], fields['annotator_id'])
        if key in seen:
            raise ParseError(line_no, f"duplicate annotation for image {key[0]} by {key[1]}")
        seen.add(key)

        records.append(AnnotationRecord(
            image_id=fields['image_id'],
            annotator_id=fields['annotator_id'],
            labels=tuple(fields['labels'].get(aid, 0.0) for aid in registry.ids),
            rationale=dict(fields['rationale']),
        ))
    logger.info(f"Loaded {len(records)} annotation records from {path}")
    return records


def build_ground_truth(annotations, registry, mode=DUAL, source_split=''):
    """
    dual: exactly two annotators per image, merged by agreement on 1.
    majority: two or more annotators, strict majority per attribute.
    """
    if mode not in (DUAL, MAJORITY):
        raise ModeMismatchError(f"Unknown ground-truth mode: {mode}")

    by_image = defaultdict(list)
    for record in annotations:
        by_image[record.image_id].append(record)

    records = []
    for image_id in sorted(by_image):
        group = sorted(by_image[image_id], key=lambda r: r.annotator_id)
        if len(group) < 2:
            raise MissingAnnotatorError(image_id, 2, len(group))
        if mode == DUAL:
            if len(group) > 2:
                raise ModeMismatchError(
                    f"Image {image_id} has {len(group)} annotators; dual mode merges exactly 2, use majority mode"
                )
            vector = merge_dual(*group)
        else:
            vector = majority_vector(group)

        score = severity_score(counts_from_vector(vector, registry), registry)
        records.append(ImageRecord(
            image_id=image_id,
            merged_attributes=vector,
            gt_score=score.value,
            gt_level=int(score.determined_level) if score.determined_level else None,
            source_split=source_split,
        ))
    logger.info(f"Built ground truth for {len(records)} images ({mode} mode)")
    return records


def write_ground_truth(records, path, registry):
    _write_jsonl(
        (
            {
                'image_id': r.image_id,
                'attributes': r.attribute_ids(registry),
                'gt_score': r.gt_score,
                'gt_level': r.gt_level,
                'source_split': r.source_split,
            }
            for r in records
        ),
        path,
    )
    logger.info(f"Wrote {len(records)} ground-truth records to {path}")


def ground_truth_from_rows(rows, registry):
    """
    Ground-truth records from (line number, mapping) rows, re-deriving every
    score from its attributes.
    """
    records = []
    seen = set()
    for line_no, data in rows:
        fields = _validated(GroundTruthLineSerializer, data, line_no)
        present = set()
        for attribute_id in fields['attributes']:
            if attribute_id not in registry:
                raise UnknownAttributeError(line_no, attribute_id)
            present.add(attribute_id)
        if fields['image_id'] in seen:
            raise ParseError(line_no, f"duplicate image id {fields['image_id']}")
        seen.add(fields['image_id'])

        vector = tuple(1 if aid in present else 0 for aid in registry.ids)
        recomputed = severity_score(counts_from_vector(vector, registry), registry)
        if abs(recomputed.value - fields['gt_score']) > REPRODUCIBILITY_TOLERANCE:
            raise ParseError(
                line_no, f"gt_score {fields['gt_score']} does not match {recomputed.value} recomputed from attributes"
            )
        derived_level = int(recomputed.determined_level) if recomputed.determined_level else None
        if 'gt_level' in data and fields['gt_level'] != derived_level:
            raise ParseError(line_no, f"gt_level {fields['gt_level']} does not match derived level {derived_level}")

        records.append(ImageRecord(
            image_id=fields['image_id'],
            merged_attributes=vector,
            gt_score=fields['gt_score'],
            gt_level=derived_level,
            source_split=fields['source_split'],
        ))
    return records


def load_ground_truth(path, registry):
    records = ground_truth_from_rows(_read_jsonl(path), registry)
    logger.info(f"Loaded {len(records)} ground-truth records from {path}")
    return records


def parse_model_response(text):
    """
    Score from free-form model output: a "score" field when the text (or a
    fenced code block in it) is JSON, otherwise the first decimal literal
    lying in [0, 1].
    """
    if not text or not text.strip():
        raise NoScoreFoundError(text or '')

    candidates = [m.group(1) for m in FENCED_BLOCK.finditer(text)] + [text]
    for candidate in candidates:
        try:
            data = json.loads(candidate.strip())
        except json.JSONDecodeError:
            continue
        if isinstance(data, dict) and isinstance(data.get('score'), (int, float)) and not isinstance(data['score'], bool):
            value = float(data['score'])
            if not 0.0 <= value <= 1.0:
                raise OutOfRangeError(value)
            return value

    literals = [float(m.group(0)) for m in DECIMAL_LITERAL.finditer(text)]
    for value in literals:
        if 0.0 <= value <= 1.0:
            return value
    if literals:
        raise OutOfRangeError(literals[0])
    raise NoScoreFoundError(text)


def predictions_from_rows(rows):
    predictions = []
    seen = set()
    for line_no, data in rows:
        fields = _validated(PredictionLineSerializer, data, line_no)
        if fields['image_id'] in seen:
            raise ParseError(line_no, f"duplicate prediction for image {fields['image_id']}")
        seen.add(fields['image_id'])
        score = fields.get('score')
        if score is not None and not 0.0 <= score <= 1.0:
            raise OutOfRangeError(score)
        predictions.append(Prediction(fields['image_id'], score, fields.get('raw_response')))
    return predictions


def load_predictions(path):
    predictions = predictions_from_rows(_read_jsonl(path))
    logger.info(f"Loaded {len(predictions)} predictions from {path}")
    return predictions


def _resolve(prediction):
    if prediction.score is not None:
        return prediction.score
    return parse_model_response(prediction.raw_response)


def resolve_predictions(predictions, threads=1):
    """image_id -> score, parsing raw responses on a thread pool."""
    predictions = list(predictions)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        scores = list(executor.map(_resolve, predictions))
    resolved = {}
    for prediction, score in zip(predictions, scores):
        if prediction.image_id in resolved:
            raise DuplicateIdError(prediction.image_id)
        resolved[prediction.image_id] = score
    return resolved


def _id_listing(ids, limit=20):
    ids = sorted(ids)
    shown = ", ".join(ids[:limit])
    if len(ids) > limit:
        shown += f", ... ({len(ids) - limit} more)"
    return shown


def join_records(ground_truth, scores):
    records = []
    missing = []
    for gt in ground_truth:
        if gt.image_id not in scores:
            missing.append(gt.image_id)
            continue
        records.append(EvaluationRecord(gt.image_id, gt.gt_score, gt.gt_level, scores[gt.image_id]))
    extra = set(scores) - {gt.image_id for gt in ground_truth}
    if missing:
        logger.warning(
            f"{len(missing)} ground-truth image(s) have no prediction and were skipped: {_id_listing(missing)}"
        )
    if extra:
        logger.warning(
            f"{len(extra)} prediction(s) have no ground-truth record and were ignored: {_id_listing(extra)}"
        )
    if not records:
        raise EmptyInputError("matched prediction / ground-truth records")
    return records


def write_report(report, path):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(json.dumps(report.to_dict(), indent=2, sort_keys=True))
        f.write('\n')
    logger.info(f"Wrote metrics report to {path}")


def load_report(path):
    with open(path, 'r', encoding='utf-8') as f:
        return MetricsReport.from_dict(json.load(f))


def write_confusion_csv(report, path):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(['gt_level', 'pred_L1', 'pred_L2', 'pred_L3', 'pred_L4'])
        for level, row in enumerate(report.confusion, start=1):
            writer.writerow([f"L{level}"] + list(row))
        writer.writerow(['safe'] + list(report.safe_row))
    logger.info(f"Wrote confusion matrix to {path}")
