"""
Input validation and report rendering for the management commands.

Matrices travel as nested lists of reals, or as ``{"re": [[...]], "im":
[[...]]}`` when complex. Extended reals render as numbers or the strings
``"+inf"`` and ``"-inf"``; NaN renders as null.
"""

from __future__ import annotations

import math
from dataclasses import fields

import numpy as np
from django.utils.translation import gettext_lazy as _
from rest_framework import serializers

from channels.maps import CpMap, choi_from_kraus
from matcore.conf import Numerics
from matcore.exceptions import NumericsError
from matcore.extreal import ExtReal
from matcore.linalg import PsdMatrix
from means.functions import parse_scalar_fn
from means.utils import AltMeanKind
from projections.jordan import Projection

from .models import Command
from .suites import SUITES

MAX_SEED = 2**63 - 1
TOL_KEYS = tuple(f.name for f in fields(Numerics) if f.name not in ("dim_cap", "threads"))


class MatrixField(serializers.Field):
    PLAIN = "plain"
    PSD = "psd"
    PROJECTION = "projection"

    default_error_messages = {
        "invalid": _("Expected a matrix of numbers, or an object with 're' and optional 'im'."),
        "shape": _("Expected a non-empty two-dimensional matrix."),
        "square": _("Matrix must be square."),
        "finite": _("Matrix entries must be finite."),
    }

    def __init__(self, *, kind: str = PSD, square: bool = True, **kwargs) -> None:
        self.kind = kind
        self.square = square
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        if isinstance(data, dict):
            if "re" not in data or set(data) - {"re", "im"}:
                self.fail("invalid")
            re, im = data["re"], data.get("im")
        else:
            re, im = data, None
        try:
            real = np.asarray(re, dtype=float)
            imag = None if im is None else np.asarray(im, dtype=float)
        except (TypeError, ValueError):
            self.fail("invalid")
        if real.ndim != 2 or real.size == 0 or (imag is not None and imag.shape != real.shape):
            self.fail("shape")
        if self.square and real.shape[0] != real.shape[1]:
            self.fail("square")
        if not (np.all(np.isfinite(real)) and (imag is None or np.all(np.isfinite(imag)))):
            self.fail("finite")
        arr = real if imag is None else real + 1j * imag
        try:
            if self.kind == self.PSD:
                arr = np.array(PsdMatrix(arr).data)
            elif self.kind == self.PROJECTION:
                arr = np.array(Projection(arr).matrix)
        except NumericsError as exc:
            raise serializers.ValidationError(str(exc))
        return arr

    def to_representation(self, value):
        arr = np.asarray(value)
        if np.iscomplexobj(arr) and np.abs(arr.imag).max(initial=0.0) > 0.0:
            return {"re": arr.real.tolist(), "im": arr.imag.tolist()}
        return {"re": arr.real.tolist()}


class ExtRealField(serializers.Field):
    """Float that may be ±inf on the way in and out."""

    default_error_messages = {
        "invalid": _("Expected a number, '+inf' or '-inf'."),
    }

    def to_internal_value(self, data):
        if isinstance(data, str) and data.strip() in ("+inf", "inf", "-inf"):
            return -math.inf if data.strip() == "-inf" else math.inf
        if isinstance(data, bool):
            self.fail("invalid")
        try:
            value = float(data)
        except (TypeError, ValueError):
            self.fail("invalid")
        if math.isnan(value):
            self.fail("invalid")
        return value

    def to_representation(self, value):
        raw = value.value if isinstance(value, ExtReal) else float(value)
        if math.isnan(raw):
            return None
        return ExtReal(raw).to_json()


def _numerics_guard(fn, *args, field: str | None = None, **kwargs):
    try:
        return fn(*args, **kwargs)
    except NumericsError as exc:
        raise serializers.ValidationError(str(exc) if field is None else {field: [str(exc)]})


def _same_dims(attrs: dict, names: list[str]) -> None:
    """Point at the first field whose dimension disagrees with the first one."""
    reference = None
    for name in names:
        value = attrs.get(name)
        members = value if isinstance(value, list) else [value]
        for index, member in enumerate(members):
            if member is None:
                continue
            if reference is None:
                reference = member.shape
            elif member.shape != reference:
                pointer = f"{name}[{index}]" if isinstance(value, list) else name
                raise serializers.ValidationError(
                    {pointer: [_("Dimension %(got)s differs from %(want)s.") % {"got": member.shape, "want": reference}]}
                )


# -- run configuration ---------------------------------------------------------


class RunConfigSerializer(serializers.Serializer):
    command = serializers.ChoiceField(choices=Command.choices)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED, default=0)
    tol = serializers.DictField(child=serializers.FloatField(min_value=0.0), default=dict)
    cap = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    format = serializers.ChoiceField(choices=(("json", "JSON"), ("csv", "CSV")), default="json")
    out = serializers.CharField(required=False, allow_null=True)
    record = serializers.BooleanField(default=False)
    inputs = serializers.DictField(default=dict)
    paths = serializers.DictField(default=dict)

    def validate_tol(self, value):
        unknown = sorted(set(value) - set(TOL_KEYS))
        if unknown:
            raise serializers.ValidationError(
                _("Unknown tolerance %(keys)s; expected one of %(known)s.")
                % {"keys": ", ".join(unknown), "known": ", ".join(TOL_KEYS)}
            )
        return value

    def create(self, validated_data):
        from .runner import RunConfig

        return RunConfig(**validated_data)


# -- command inputs --------------------------------------------------------------


class MeansInputSerializer(serializers.Serializer):
    a = MatrixField()
    b = MatrixField()
    t = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.5)
    kind = serializers.ChoiceField(choices=("ka", *AltMeanKind.values), default="ka")
    z = ExtRealField(default=1.0)
    f = serializers.CharField(required=False)

    def validate_f(self, value):
        return _numerics_guard(parse_scalar_fn, value)

    def validate_z(self, value):
        if not value > 0:
            raise serializers.ValidationError(_("z must be positive."))
        return value

    def validate(self, attrs):
        _same_dims(attrs, ["a", "b"])
        if attrs["kind"] != "ka" and not 0.0 < attrs["t"] < 1.0:
            raise serializers.ValidationError({"t": [_("Rival means take a weight in (0, 1).")]})
        if math.isinf(attrs["z"]) and attrs["kind"] != AltMeanKind.GHAT:
            raise serializers.ValidationError({"z": [_("z = +inf is only defined for Ghat.")]})
        return attrs


class DivergenceInputSerializer(serializers.Serializer):
    rho = MatrixField()
    sigma = MatrixField()
    alphas = serializers.ListField(
        child=serializers.FloatField(min_value=0.0), default=lambda: [0.5, 1.0, 2.0]
    )
    rates = serializers.ListField(child=serializers.FloatField(min_value=0.0), default=list)
    points = serializers.IntegerField(min_value=16, max_value=1 << 16, default=512)

    def validate_alphas(self, value):
        for alpha in value:
            if alpha <= 0.0 or math.isinf(alpha):
                raise serializers.ValidationError(_("Orders must be finite and positive."))
        return value

    def validate(self, attrs):
        _same_dims(attrs, ["rho", "sigma"])
        return attrs


class BoundsInputSerializer(serializers.Serializer):
    nulls = serializers.ListField(child=MatrixField(), min_length=1)
    alts = serializers.ListField(child=MatrixField(), min_length=1)
    r = serializers.FloatField(min_value=0.0)
    grid = serializers.IntegerField(min_value=2, max_value=401, default=101)
    alpha_points = serializers.IntegerField(min_value=16, max_value=1 << 16, default=512)
    hull_points = serializers.IntegerField(min_value=0, default=20)

    def validate(self, attrs):
        _same_dims(attrs, ["nulls", "alts"])
        return attrs


class MembershipInputSerializer(serializers.Serializer):
    c = MatrixField()
    family = serializers.ListField(child=MatrixField(), min_length=1)
    copies = serializers.IntegerField(min_value=1, max_value=6, default=3)
    trials = serializers.IntegerField(min_value=0, default=1000)
    points = serializers.IntegerField(min_value=11, default=2001)

    def validate(self, attrs):
        _same_dims(attrs, ["c", "family"])
        return attrs


class CpMapSerializer(serializers.Serializer):
    dim_in = serializers.IntegerField(min_value=1)
    dim_out = serializers.IntegerField(min_value=1)
    kraus = serializers.ListField(
        child=MatrixField(kind=MatrixField.PLAIN, square=False), min_length=1, required=False
    )
    choi = MatrixField(required=False)

    def validate(self, attrs):
        if ("kraus" in attrs) == ("choi" in attrs):
            raise serializers.ValidationError(_("Give exactly one of 'kraus' or 'choi'."))
        if "choi" in attrs:
            return _numerics_guard(CpMap, attrs["dim_in"], attrs["dim_out"], attrs["choi"], field="choi")
        for index, op in enumerate(attrs["kraus"]):
            if op.shape != (attrs["dim_out"], attrs["dim_in"]):
                raise serializers.ValidationError(
                    {f"kraus[{index}]": [_("Kraus operators are dim_out × dim_in.")]}
                )
        return _numerics_guard(choi_from_kraus, attrs["kraus"], field="kraus")


class ChannelsInputSerializer(serializers.Serializer):
    e = CpMapSerializer()
    n1 = CpMapSerializer()
    n2 = CpMapSerializer()
    copies = serializers.ListField(
        child=serializers.IntegerField(min_value=1, max_value=3), min_length=1, default=lambda: [1]
    )
    trials = serializers.IntegerField(min_value=0, default=100)

    def validate(self, attrs):
        reference = attrs["e"]
        for name in ("n1", "n2"):
            other = attrs[name]
            if (other.dim_in, other.dim_out) != (reference.dim_in, reference.dim_out):
                raise serializers.ValidationError({name: [_("Channels must share input and output dimensions.")]})
        return attrs


class JordanInputSerializer(serializers.Serializer):
    s = MatrixField(kind=MatrixField.PROJECTION)
    q = MatrixField(kind=MatrixField.PROJECTION)
    eps = serializers.FloatField(min_value=0.0, required=False)

    def validate_eps(self, value):
        if value >= 1.0:
            raise serializers.ValidationError(_("eps must lie in [0, 1)."))
        return value

    def validate(self, attrs):
        _same_dims(attrs, ["s", "q"])
        return attrs


class AppendixAInputSerializer(serializers.Serializer):
    k = serializers.IntegerField(min_value=1, max_value=12)
    r = serializers.FloatField(min_value=0.0)
    t_grid = serializers.IntegerField(min_value=2, max_value=10_001, default=101)
    points = serializers.IntegerField(min_value=16, max_value=1 << 16, default=512)


class ReproduceAllInputSerializer(serializers.Serializer):
    quick = serializers.BooleanField(default=False)
    suites = serializers.ListField(child=serializers.CharField(), required=False)

    def validate_suites(self, value):
        unknown = sorted(set(value) - set(SUITES))
        if unknown:
            raise serializers.ValidationError(
                _("Unknown suite %(names)s.") % {"names": ", ".join(unknown)}
            )
        return value


# -- reports ----------------------------------------------------------------------


class MembershipVerdictSerializer(serializers.Serializer):
    member = serializers.BooleanField()
    method = serializers.CharField()
    t_intervals = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()))
    best_t = serializers.FloatField(allow_null=True)
    best_margin = ExtRealField()
    witness_n = serializers.IntegerField(allow_null=True)
    witness_X = MatrixField(allow_null=True)


class AmFeasibilitySerializer(serializers.Serializer):
    n = serializers.IntegerField()
    feasible = serializers.BooleanField()
    mu = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    max_lambda_min = ExtRealField()
    p_interval = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    witness = MatrixField(allow_null=True)


class OracleResultSerializer(serializers.Serializer):
    holds = serializers.BooleanField()
    method = serializers.CharField()
    worst_margin = ExtRealField()
    trials = serializers.IntegerField()


class HoeffdingResultSerializer(serializers.Serializer):
    value = ExtRealField()
    maximizer_alpha = ExtRealField()
    grid_resolution = serializers.FloatField()
    at_boundary = serializers.BooleanField()


class GridCellSerializer(serializers.Serializer):
    s = serializers.FloatField()
    t = serializers.FloatField()
    direct = ExtRealField()


class ExponentReportSerializer(serializers.Serializer):
    r = serializers.FloatField()
    trivial_direct_upper = ExtRealField()
    geometric_direct_upper = ExtRealField()
    trivial_sc_lower = ExtRealField()
    geometric_sc_lower = ExtRealField()
    convex_hull_sc = ExtRealField()
    mean_grid = serializers.IntegerField()
    alpha_points = serializers.IntegerField()
    direct_argmin = serializers.ListField(child=serializers.FloatField())
    sc_argmax = serializers.ListField(child=serializers.FloatField())
    ordering_ok = serializers.BooleanField()
    cells = GridCellSerializer(many=True)


class ChainLinkSerializer(serializers.Serializer):
    left = serializers.CharField()
    right = serializers.CharField()
    relation = serializers.CharField()
    asserted_strict = serializers.BooleanField()
    margin = ExtRealField()
    holds = serializers.BooleanField()


class AppendixAReportSerializer(serializers.Serializer):
    k = serializers.IntegerField()
    r = serializers.FloatField()
    pairwise = ExtRealField()
    relative_entropy_gap = ExtRealField()
    closed_form = ExtRealField()
    geometric = ExtRealField()
    mixture = ExtRealField()
    mixture_d_max = ExtRealField()
    mixture_r_inf = ExtRealField()
    threshold = serializers.FloatField(allow_null=True)
    t_grid = serializers.IntegerField()
    holds = serializers.BooleanField()
    mixture_strict = serializers.BooleanField()
    links = ChainLinkSerializer(many=True)


class DiscriminationReportSerializer(serializers.Serializer):
    n = serializers.IntegerField()
    mean_member = serializers.BooleanField()
    t_intervals = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()))
    am_feasible = serializers.BooleanField()
    am_mu = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    strategies_pass = serializers.BooleanField()
    worst_margin = ExtRealField()
    trials = serializers.IntegerField()
    consistent = serializers.BooleanField()


class JordanBlockSerializer(serializers.Serializer):
    theta = serializers.FloatField()
    cos = serializers.FloatField()
    sin = serializers.FloatField()


class JordanDecompositionSerializer(serializers.Serializer):
    blocks = JordanBlockSerializer(many=True)
    commuting_dim = serializers.SerializerMethodField()
    s_prime = serializers.ListField(child=serializers.FloatField())
    q_prime = serializers.ListField(child=serializers.FloatField())
    overlap = serializers.FloatField()

    def get_commuting_dim(self, obj) -> int:
        return int(obj.commuting_basis.shape[1])


class ConditionReportSerializer(serializers.Serializer):
    relation = serializers.CharField()
    eps = serializers.FloatField()
    conditions = serializers.DictField(child=serializers.BooleanField())
    holds = serializers.BooleanField()
    agree = serializers.BooleanField()


def error_pointers(detail, prefix: str = "") -> list[str]:
    """Flatten DRF error detail into ``field.sub[index]: message`` lines."""
    if isinstance(detail, dict):
        lines = []
        for key, value in detail.items():
            if key == "non_field_errors":
                pointer = prefix
            elif isinstance(key, int):
                pointer = f"{prefix}[{key}]"
            else:
                pointer = f"{prefix}.{key}" if prefix else str(key)
            lines += error_pointers(value, pointer)
        return lines
    if isinstance(detail, list):
        if all(isinstance(item, str) for item in detail):
            return [f"{prefix or 'input'}: {message}" for message in detail]
        lines = []
        for index, item in enumerate(detail):
            if item:
                lines += error_pointers(item, f"{prefix}[{index}]")
        return lines
    return [f"{prefix or 'input'}: {detail}"]
