from __future__ import annotations

from django.db import models
from django.utils.translation import gettext_lazy as _


class Command(models.TextChoices):
    MEANS = "means", _("Operator means")
    DIVERGENCE = "divergence", _("Rényi and Hoeffding divergences")
    BOUNDS = "bounds", _("Error-exponent bounds")
    MEMBERSHIP = "membership", _("Membership certification")
    CHANNELS = "channels", _("Channel means and discrimination")
    JORDAN = "jordan", _("Two-projection normal form")
    APPENDIX_A = "appendix-a", _("Commuting example chain")
    REPRODUCE_ALL = "reproduce-all", _("Acceptance suites")


class RunReportQuerySet(models.QuerySet):
    def for_command(self, command: str):
        return self.filter(command=Command(command))

    def violations(self):
        return self.filter(status=RunReport.Status.VIOLATION)


class RunReport(models.Model):
    class Status(models.TextChoices):
        OK = "OK", _("All checks passed")
        VIOLATION = "VIOLATION", _("Certified property violation")

    command = models.CharField(max_length=20, choices=Command.choices)
    seed = models.PositiveBigIntegerField(default=0)
    status = models.CharField(max_length=10, choices=Status.choices, default=Status.OK)
    schema_version = models.PositiveSmallIntegerField()
    payload = models.JSONField(default=dict, blank=True)
    wall_time = models.FloatField(help_text=_("Seconds spent computing the report."))
    created_at = models.DateTimeField(auto_now_add=True)

    objects = RunReportQuerySet.as_manager()

    class Meta:
        ordering = ("-created_at",)

    @property
    def violation_count(self) -> int:
        return len(self.payload.get("violations", []))

    def __str__(self) -> str:
        return f"RunReport<{self.command} seed={self.seed}: {self.status}>"
