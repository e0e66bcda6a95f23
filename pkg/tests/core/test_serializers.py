import io
import json
from dataclasses import replace
from fractions import Fraction

import pytest

from expmap.core.components import HyperbolicComponent, internal_ray
from expmap.core.rays import Landing, trace_parameter_ray
from expmap.core.serializers import (
    ComponentRecord,
    ComponentSerializer,
    Partition,
    PartitionSerializer,
    RaySummary,
    RaySummarySerializer,
    RecordError,
    dump_components,
    load_components,
    write_internal_ray_csv,
    write_ray_csv,
)
from expmap.core.symbolic import IntermediateAddress


@pytest.fixture
def labelled(period_two):
    return HyperbolicComponent(
        period=2,
        seed_kappa=period_two.seed_kappa,
        seed_point=period_two.seed_point,
        seed_multiplier=period_two.seed_multiplier,
        branch_tag=period_two.branch_tag,
        intermediate_address=IntermediateAddress((Fraction(1, 2),)),
        intermediate_confirmed=None,
        root=period_two.root,
    )


def test_component_representation(period_one):
    data = ComponentSerializer(period_one).data
    assert data["period"] == 1
    assert data["branchTag"] == 0
    assert data["seed"]["kappa"] == {
        "re": period_one.seed_kappa.real,
        "im": period_one.seed_kappa.imag,
    }
    assert data["intermediateAddress"] is None
    assert data["intermediateEmpirical"] is False
    assert data["root"] is None


def test_records_survive_a_dump(period_one, labelled):
    records = [
        ComponentRecord(component=period_one, boundary=(-1 + 0j, 1 + 3.14j), children=(labelled,)),
        ComponentRecord(component=labelled),
    ]
    dumped = dump_components(records)
    assert dumped.endswith(b"\n")
    data = json.loads(dumped)
    assert data[1]["intermediateAddress"] == "[1/2]"
    assert data[1]["intermediateEmpirical"] is True
    assert data[0]["boundary"][1] == {"re": 1.0, "im": 3.14}

    loaded = load_components(io.BytesIO(dumped))
    assert [record.component for record in loaded] == [period_one, labelled]
    assert loaded[0].children == (labelled,)
    assert loaded[0].boundary == (-1 + 0j, 1 + 3.14j)
    assert loaded[1].period == 2


def test_records_delegate_to_the_component(period_one):
    record = ComponentRecord(component=period_one)
    assert record.seed_kappa == period_one.seed_kappa
    with pytest.raises(AttributeError):
        record.no_such_field


@pytest.mark.parametrize(
    "data",
    [
        b"not json",
        b'{"period": 1}',
        b'[{"period": 0, "seed": {}, "branchTag": 0}]',
        b'[{"period": 1, "branchTag": 0, "seed": '
        b'{"kappa": {"re": true, "im": 0}, "point": {"re": 0, "im": 0}, '
        b'"multiplier": {"re": 0.5, "im": 0}}}]',
        b'[{"period": 1, "branchTag": 0, "seed": '
        b'{"kappa": {"re": -2, "im": 0}, "point": {"re": 0, "im": 0}, '
        b'"multiplier": {"re": 1.5, "im": 0}}}]',
        b'[{"period": 1, "branchTag": 0, "intermediateAddress": "[1/2]", "seed": '
        b'{"kappa": {"re": -2, "im": 0}, "point": {"re": 0, "im": 0}, '
        b'"multiplier": {"re": 0.5, "im": 0}}}]',
        b'[{"period": 2, "branchTag": 0, "intermediateAddress": "[;0]", "seed": '
        b'{"kappa": {"re": -2, "im": 0}, "point": {"re": 0, "im": 0}, '
        b'"multiplier": {"re": 0.5, "im": 0}}}]',
    ],
)
def test_invalid_records(data):
    with pytest.raises(RecordError):
        load_components(io.BytesIO(data))


def test_ray_summary(zero):
    ray = trace_parameter_ray(zero, 20, 5)
    data = RaySummarySerializer(RaySummary.from_ray(ray)).data
    assert data["address"] == "[;0]"
    assert data["tMax"] == 20
    assert data["tMin"] == 5
    assert data["samples"] == len(ray.samples)
    assert data["landing"] is None
    landed = RaySummary.from_ray(replace(ray, landing=Landing(kappa=-1 + 0j, error=1e-6)))
    assert RaySummarySerializer(landed).data["landing"] == {"re": -1.0, "im": 0.0}


def test_partition(period_one, period_two):
    data = PartitionSerializer(Partition(max_depth=2, classes=((period_one, period_two),))).data
    assert data["maxDepth"] == 2
    assert [component["period"] for component in data["classes"][0]] == [1, 2]


def test_ray_csv(zero):
    ray = trace_parameter_ray(zero, 20, 10)
    stream = io.StringIO()
    write_ray_csv(ray, stream)
    lines = stream.getvalue().splitlines()
    assert lines[0] == "t,re,im,residual,depth"
    assert len(lines) == len(ray.samples) + 1
    t, re, im, _, depth = lines[1].split(",")
    assert float(t) == 20
    assert float(im) == 0
    assert int(depth) == ray.samples[0].depth


def test_internal_ray_csv(period_one):
    ray = internal_ray(period_one, 0.5, -2.0, -1.0)
    stream = io.StringIO()
    write_internal_ray_csv(ray, stream)
    lines = stream.getvalue().splitlines()
    assert lines[0] == "t,re_kappa,im_kappa,re_mu,im_mu"
    assert len(lines) == len(ray.samples) + 1
    assert float(lines[1].split(",")[0]) == -2.0
