# core/urls.py
from django.contrib import admin
from django.urls import path

urlpatterns = [
    # runs salvos (ExperimentRun / SweepRow)
    path("admin/", admin.site.urls),
]
