from django.contrib import admin
from .models import ExperimentRun, SweepRow


class SweepRowInline(admin.TabularInline):
    model = SweepRow
    extra = 0
    can_delete = False
    fields = ("position", "variant", "levels", "alpha", "snr_db", "bit_rate", "ber", "d_norm", "throughput_bps", "error")
    readonly_fields = fields
    show_change_link = True


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ("name", "host_kind", "seed", "status", "rows_total", "rows_flagged", "created_at", "finished_at")
    search_fields = ("name", "out_dir")
    list_filter = ("status", "host_kind", "created_at")
    readonly_fields = ("plan_text", "created_at", "finished_at")
    inlines = [SweepRowInline]


@admin.register(SweepRow)
class SweepRowAdmin(admin.ModelAdmin):
    list_display = ("run", "variant", "levels", "snr_db", "bit_rate", "trial", "ber", "d_norm", "throughput_bps")
    search_fields = ("run__name",)
    list_filter = ("variant", "levels", "run")
