"""
URL configuration for the cosnufft project.

The pricing and benchmark endpoints live under ``api/``; the OpenAPI
schema is served by drf-yasg.
"""
from django.urls import path, include
from drf_yasg.views import get_schema_view
from drf_yasg import openapi
from rest_framework import permissions

schema_view = get_schema_view(
    openapi.Info(
        title="COS-NUFFT Pricing API",
        default_version='v1',
        description="Batch European option pricing with the COS method and a type-2 NUFFT backend",
        license=openapi.License(name="BSD License"),
    ),
    public=True,
    permission_classes=(permissions.AllowAny,),
)

urlpatterns = [
    # Swagger UI
    path('swagger/', schema_view.with_ui('swagger', cache_timeout=0), name='schema-swagger-ui'),
    path('redoc/', schema_view.with_ui('redoc', cache_timeout=0), name='schema-redoc'),
    path('api/', include('frontend.urls')),
]
