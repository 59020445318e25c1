from rest_framework.views import APIView
from rest_framework.response import Response
from rest_framework import status
from django.shortcuts import get_object_or_404
from .config import get_registry
from .exceptions import CPRTError
from .models import Job
from .scoring import counts_from_attributes, severity_score
from .serializers import (
    BoundaryDerivationRequestSerializer,
    ClassifyRequestSerializer,
    EvaluationRequestSerializer,
    JobSerializer,
    ScoreRequestSerializer,
)
from .taxonomy import classify_attribute
from .tasks import process_job
import logging

logger = logging.getLogger(__name__)

# Taxonomy endpoints
class TaxonomyDetail(APIView):
    def get(self, request):
        """Registry summary: attributes, cardinalities, weights, boundaries and slacks"""
        registry = get_registry()
        data = registry.to_dict()
        data['cardinalities'] = list(registry.cardinalities)
        data['slacks'] = list(registry.slacks)
        return Response(data)

class ScoreView(APIView):
    def post(self, request):
        """Severity score for per-level counts or a list of present attribute ids"""
        serializer = ScoreRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)

        registry = get_registry()
        try:
            if 'counts' in serializer.validated_data:
                counts = serializer.validated_data['counts']
            else:
                counts = counts_from_attributes(serializer.validated_data['attributes'], registry)
            score = severity_score(counts, registry)
        except (CPRTError, KeyError) as e:
            return Response({"error": str(e)}, status=status.HTTP_400_BAD_REQUEST)
        return Response(score.to_dict())

class ClassifyView(APIView):
    def post(self, request):
        """Level from the four ordered decision answers"""
        serializer = ClassifyRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        try:
            level = classify_attribute(serializer.validated_data['answers'])
        except CPRTError as e:
            return Response({"error": str(e)}, status=status.HTTP_400_BAD_REQUEST)
        return Response({"level": int(level), "label": level.label})

# Async job endpoints
class _JobSubmission(APIView):
    serializer_class = None
    kind = None

    def post(self, request):
        serializer = self.serializer_class(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)

        # Raw rows are stored so the worker applies the same line validation as file input
        params = {key: request.data[key] for key in serializer.validated_data if key in request.data}
        job = Job.objects.create(kind=self.kind, params=params, status='PENDING')

        # Queue job processing task (async)
        process_job.delay(str(job.id))
        logger.info(f"Accepted {self.kind} job {job.id}")

        return Response(
            {"id": str(job.id), "status": "accepted"},
            status=status.HTTP_202_ACCEPTED
        )

class EvaluationSubmission(_JobSubmission):
    """Queue an evaluation of predictions against ground truth"""
    serializer_class = EvaluationRequestSerializer
    kind = 'EVALUATION'

class BoundaryDerivationSubmission(_JobSubmission):
    """Queue a boundary derivation over attribute samples"""
    serializer_class = BoundaryDerivationRequestSerializer
    kind = 'BOUNDARY_DERIVATION'

class JobStatus(APIView):
    def get(self, request, job_id):
        """Get job status and, once finished, its result"""
        job = get_object_or_404(Job, pk=job_id)
        serializer = JobSerializer(job)
        return Response(serializer.data)
