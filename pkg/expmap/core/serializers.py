import csv
from dataclasses import dataclass
from typing import Optional, Tuple

from rest_framework import serializers
from rest_framework.exceptions import ParseError
from rest_framework.exceptions import ValidationError as RestValidationError
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from expmap.core.components import HyperbolicComponent
from expmap.core.symbolic import AddressSyntaxError, parse_address


class RecordError(Exception):
    pass


class ComplexField(serializers.Field):
    """Complex numbers as ``{"re": ..., "im": ...}``."""

    default_error_messages = {"invalid": "Expected an object with numeric re and im."}

    def to_representation(self, value):
        value = complex(value)
        return {"re": value.real, "im": value.imag}

    def to_internal_value(self, data):
        try:
            parts = data["re"], data["im"]
        except (TypeError, KeyError):
            self.fail("invalid")
        if any(isinstance(part, bool) or not isinstance(part, (int, float)) for part in parts):
            self.fail("invalid")
        return complex(*parts)


class AddressField(serializers.Field):
    """Addresses in their textual form ``[p1,...;q1,...]`` or ``[s1,...,k/2]``."""

    def to_representation(self, value):
        return str(value)

    def to_internal_value(self, data):
        if not isinstance(data, str):
            raise serializers.ValidationError("Addresses are written as strings.")
        try:
            return parse_address(data)
        except AddressSyntaxError as e:
            raise serializers.ValidationError(str(e))


class SeedSerializer(serializers.Serializer):
    kappa = ComplexField(source="seed_kappa")
    point = ComplexField(source="seed_point")
    multiplier = ComplexField(source="seed_multiplier")


class ComponentSerializer(serializers.Serializer):
    period = serializers.IntegerField(min_value=1)
    seed = SeedSerializer(source="*")
    branchTag = serializers.IntegerField(source="branch_tag")
    intermediateAddress = AddressField(
        source="intermediate_address", allow_null=True, required=False, default=None
    )
    intermediateEmpirical = serializers.SerializerMethodField()
    intermediateConfirmed = serializers.BooleanField(
        source="intermediate_confirmed", allow_null=True, required=False, default=None
    )
    root = ComplexField(allow_null=True, required=False, default=None)

    def get_intermediateEmpirical(self, component):
        # addresses are read off the tail numerically, never derived combinatorially
        return component.intermediate_address is not None

    def validate(self, attrs):
        address = attrs.get("intermediate_address")
        if address is not None and getattr(address, "period", None) != attrs["period"]:
            raise serializers.ValidationError(
                {"intermediateAddress": f"{address} does not label period {attrs['period']}."}
            )
        try:
            HyperbolicComponent(**attrs)
        except ValueError as e:
            raise serializers.ValidationError(str(e))
        return attrs

    def create(self, validated_data):
        return HyperbolicComponent(**validated_data)


@dataclass(frozen=True)
class ComponentRecord:
    """A component together with its sampled boundary and its bifurcation children."""

    component: HyperbolicComponent
    boundary: Tuple[complex, ...] = ()
    children: Tuple[HyperbolicComponent, ...] = ()

    def __getattr__(self, name):
        if name.startswith("__") or name == "component":
            raise AttributeError(name)
        return getattr(self.component, name)


class ComponentRecordSerializer(ComponentSerializer):
    boundary = serializers.ListField(child=ComplexField(), required=False, default=list)
    children = ComponentSerializer(many=True, required=False, default=list)

    def validate(self, attrs):
        component_attrs = {
            key: value for key, value in attrs.items() if key not in ("boundary", "children")
        }
        super().validate(component_attrs)
        return attrs

    def create(self, validated_data):
        boundary = validated_data.pop("boundary", [])
        children = validated_data.pop("children", [])
        return ComponentRecord(
            component=HyperbolicComponent(**validated_data),
            boundary=tuple(boundary),
            children=tuple(HyperbolicComponent(**child) for child in children),
        )


@dataclass(frozen=True)
class RaySummary:
    address: object
    t_max: float
    t_min: float
    samples: int
    landing: Optional[complex] = None
    error: Optional[float] = None
    landing_period: Optional[int] = None
    landing_multiplier: Optional[complex] = None

    @classmethod
    def from_ray(cls, ray, indifferent=None):
        landing = ray.landing
        return cls(
            address=ray.address,
            t_max=ray.samples[0].t,
            t_min=ray.samples[-1].t,
            samples=len(ray.samples),
            landing=landing.kappa if landing else None,
            error=landing.error if landing else None,
            landing_period=indifferent.period if indifferent else None,
            landing_multiplier=indifferent.multiplier if indifferent else None,
        )


class RaySummarySerializer(serializers.Serializer):
    address = AddressField()
    tMax = serializers.FloatField(source="t_max")
    tMin = serializers.FloatField(source="t_min")
    samples = serializers.IntegerField()
    landing = ComplexField(allow_null=True)
    error = serializers.FloatField(allow_null=True)
    landingPeriod = serializers.IntegerField(source="landing_period", allow_null=True)
    landingMultiplier = ComplexField(source="landing_multiplier", allow_null=True)


@dataclass(frozen=True)
class Partition:
    max_depth: int
    classes: Tuple[Tuple[HyperbolicComponent, ...], ...]


class PartitionSerializer(serializers.Serializer):
    maxDepth = serializers.IntegerField(source="max_depth")
    classes = serializers.ListField(child=ComponentSerializer(many=True))


def render_json(data):
    return JSONRenderer().render(data, renderer_context={"indent": 2}) + b"\n"


def dump_components(records):
    return render_json(ComponentRecordSerializer(records, many=True).data)


def load_components(stream):
    """Read component records from a binary stream as written by ``dump_components``."""
    try:
        data = JSONParser().parse(stream)
        serializer = ComponentRecordSerializer(data=data, many=True)
        assert serializer.is_valid(raise_exception=True)
    except (ParseError, RestValidationError) as e:
        raise RecordError(f"invalid component records: {e}") from e
    return serializer.save()


def write_ray_csv(ray, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["t", "re", "im", "residual", "depth"])
    for point in ray.samples:
        writer.writerow([point.t, point.kappa.real, point.kappa.imag, point.residual, point.depth])


def write_internal_ray_csv(ray, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["t", "re_kappa", "im_kappa", "re_mu", "im_mu"])
    for sample in ray.samples:
        writer.writerow(
            [
                sample.t,
                sample.kappa.real,
                sample.kappa.imag,
                sample.multiplier.real,
                sample.multiplier.imag,
            ]
        )
