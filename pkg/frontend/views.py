import logging

from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import APIView

from bench.cases import CASES, SUITES
from common.exceptions import PricingError

from .config import from_validated
from .pricing import density_run, density_table, price_run, price_table, table_records
from .serializers import DensityRequestSerializer, PriceRequestSerializer

logger = logging.getLogger(__name__)


def _pricing_error(exc):
    return Response(
        {"error": str(exc), "field": getattr(exc, 'field', None)},
        status=status.HTTP_400_BAD_REQUEST,
    )


class PriceView(APIView):
    """Price a strike batch from a JSON run config."""

    def post(self, request, *args, **kwargs):
        serializer = PriceRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        try:
            prices = price_run(from_validated(serializer.validated_data))
        except PricingError as exc:
            logger.warning(f"Pricing request rejected: {exc}")
            return _pricing_error(exc)
        return Response({
            "backend": prices.backend.value,
            "count": len(prices),
            "invalid": int((~prices.valid).sum()),
            "results": table_records(price_table(prices)),
        })


class DensityView(APIView):
    """Reconstruct the log-return density at the posted points."""

    def post(self, request, *args, **kwargs):
        serializer = DensityRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        try:
            batch = density_run(from_validated(serializer.validated_data))
        except PricingError as exc:
            logger.warning(f"Density request rejected: {exc}")
            return _pricing_error(exc)
        return Response({
            "backend": batch.backend,
            "count": int(batch.points.size),
            "invalid": int((~batch.valid).sum()),
            "results": table_records(density_table(batch)),
        })


class BenchCaseListView(APIView):
    """The benchmark case registry and suites."""

    def get(self, request, *args, **kwargs):
        cases = [
            {
                "name": case.name,
                "description": case.description,
                "model": {"name": case.model.name, "params": case.model.as_dict()},
                "spot": case.spot,
                "rate": case.rate,
                "dividend": case.dividend,
                "maturity": case.maturity,
                "L": case.L,
                "M": case.M,
                "tolerance": case.tolerance,
                "strike_counts": list(case.strike_counts),
                "reference": case.reference.kind,
            }
            for case in CASES.values()
        ]
        return Response({"cases": cases, "suites": {name: list(members) for name, members in SUITES.items()}})
