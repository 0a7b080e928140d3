from django.urls import path

from . import views

urlpatterns = [
    path('pricing/price/', views.PriceView.as_view(), name='pricing-price'),
    path('pricing/density/', views.DensityView.as_view(), name='pricing-density'),
    path('bench/cases/', views.BenchCaseListView.as_view(), name='bench-cases'),
]
