from rest_framework import serializers
from .models import Job

LABEL_VALUES = (0.0, 0.5, 1.0)


# JSONL record lines

class AnnotationLineSerializer(serializers.Serializer):
    image_id = serializers.CharField()
    annotator_id = serializers.CharField()
    labels = serializers.DictField(child=serializers.FloatField())
    rationale = serializers.DictField(child=serializers.CharField(allow_blank=True), required=False, default=dict)

    def validate_labels(self, value):
        for attribute_id, label in value.items():
            if label not in LABEL_VALUES:
                raise serializers.ValidationError(
                    f"label {label} for '{attribute_id}' is not one of 0, 0.5, 1", code='bad_label'
                )
        return value


class PredictionLineSerializer(serializers.Serializer):
    image_id = serializers.CharField()
    raw_response = serializers.CharField(required=False, allow_blank=True)
    score = serializers.FloatField(required=False)

    def validate(self, data):
        if 'score' not in data and not data.get('raw_response'):
            raise serializers.ValidationError("Either 'score' or a non-empty 'raw_response' is required")
        return data


class GroundTruthLineSerializer(serializers.Serializer):
    image_id = serializers.CharField()
    attributes = serializers.ListField(child=serializers.CharField(), required=False, default=list)
    gt_score = serializers.FloatField(min_value=0.0, max_value=1.0)
    gt_level = serializers.IntegerField(min_value=1, max_value=4, allow_null=True, required=False, default=None)
    source_split = serializers.CharField(required=False, allow_blank=True, default='')


# API payloads

class ScoreRequestSerializer(serializers.Serializer):
    counts = serializers.ListField(
        child=serializers.IntegerField(min_value=0), min_length=4, max_length=4, required=False
    )
    attributes = serializers.ListField(child=serializers.CharField(), required=False)

    def validate(self, data):
        if ('counts' in data) == ('attributes' in data):
            raise serializers.ValidationError("Provide exactly one of 'counts' or 'attributes'")
        return data


class ClassifyRequestSerializer(serializers.Serializer):
    answers = serializers.ListField(child=serializers.BooleanField(), min_length=4, max_length=4)


class EvaluationRequestSerializer(serializers.Serializer):
    ground_truth = GroundTruthLineSerializer(many=True)
    predictions = PredictionLineSerializer(many=True)
    seed = serializers.IntegerField(required=False)
    max_pairs = serializers.IntegerField(min_value=1, required=False)

    def validate_ground_truth(self, value):
        if not value:
            raise serializers.ValidationError("At least one ground-truth record is required")
        return value


class SampleSerializer(serializers.Serializer):
    attributes = serializers.ListField(child=serializers.CharField(), allow_empty=True)


class BoundaryDerivationRequestSerializer(serializers.Serializer):
    samples = SampleSerializer(many=True)
    hyperparams = serializers.DictField(required=False, default=dict)
    seed = serializers.IntegerField(required=False)
    percentile = serializers.FloatField(min_value=0.0, max_value=100.0, required=False)

    def validate_samples(self, value):
        if len(value) < 2:
            raise serializers.ValidationError("At least two samples are required")
        return value


class JobSerializer(serializers.ModelSerializer):
    class Meta:
        model = Job
        fields = ['id', 'kind', 'status', 'params', 'result', 'error_detail', 'created_at', 'completed_at']
        read_only_fields = fields
