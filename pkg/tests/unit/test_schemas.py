import math

import pytest
from marshmallow import ValidationError
from pydantic import ValidationError as PydanticValidationError

from ehvikit.cli.schemas import (
    DecompositionSchema,
    HistoryRowSchema,
    HyperboxSchema,
    McReportSchema,
    ValueSchema,
)
from ehvikit.models.enums import CriterionEnum, FrontKindEnum
from ehvikit.models.schemas import FrontSpec, RunConfig


@pytest.fixture
def hyperbox_schema():
    return HyperboxSchema()


@pytest.fixture
def decomposition_schema():
    return DecompositionSchema()


@pytest.fixture
def value_schema():
    return ValueSchema()


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.eta == 30
        assert cfg.tc == 300
        assert cfg.criterion is CriterionEnum.EHVI
        assert cfg.ref_point == []
        assert cfg.nugget == 1e-10

    @pytest.mark.parametrize("value", ["poi", "POI", CriterionEnum.POI])
    def test_criterion_parsing(self, value):
        assert RunConfig(criterion=value).criterion is CriterionEnum.POI

    def test_unknown_criterion(self):
        with pytest.raises(PydanticValidationError, match="not a valid CriterionEnum"):
            RunConfig(criterion="pof")

    def test_budget_below_initial_sample(self):
        with pytest.raises(PydanticValidationError, match="must be at least eta"):
            RunConfig(eta=20, tc=10)

    def test_budget_equal_to_initial_sample(self):
        assert RunConfig(eta=10, tc=10).tc == 10

    def test_inner_budget_lower_limit(self):
        with pytest.raises(PydanticValidationError):
            RunConfig(inner_budget=99)

    def test_json_dump(self):
        dumped = RunConfig(criterion="poi", ref_point=[-1.0, -2.0]).model_dump(mode="json")
        assert dumped["criterion"] == "poi"
        assert dumped["ref_point"] == [-1.0, -2.0]


class TestFrontSpec:
    def test_kind_aliases(self):
        assert FrontSpec(kind="convex-spherical", d=3, n=5).kind is FrontKindEnum.CONVEX_SPHERICAL

    @pytest.mark.parametrize(
        "kwargs",
        [{"d": 1, "n": 5}, {"d": 3, "n": 0}, {"d": 3, "n": 5, "radius": 0.0}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(PydanticValidationError):
            FrontSpec(**kwargs)


class TestHyperboxSchema:
    def test_dump_writes_infinity_as_text(self, hyperbox_schema):
        dumped = hyperbox_schema.dump({"lower": [0.0, -math.inf], "upper": [math.inf, 2.5]})
        assert dumped == {"lower": [0.0, "-inf"], "upper": ["inf", 2.5]}

    def test_load_reads_infinity(self, hyperbox_schema):
        loaded = hyperbox_schema.load({"lower": ["-inf", 0], "upper": [1, "inf"]})
        assert loaded["lower"][0] == -math.inf
        assert loaded["upper"][1] == math.inf

    def test_empty_box_rejected(self, hyperbox_schema):
        with pytest.raises(ValidationError, match="below its upper bound"):
            hyperbox_schema.load({"lower": [0, 1], "upper": [1, 1]})

    def test_length_mismatch_rejected(self, hyperbox_schema):
        with pytest.raises(ValidationError, match="same length"):
            hyperbox_schema.load({"lower": [0, 0], "upper": [1]})

    def test_missing_field(self, hyperbox_schema):
        with pytest.raises(ValidationError) as excinfo:
            hyperbox_schema.load({"lower": [0, 0]})
        assert "upper" in excinfo.value.messages


class TestDecompositionSchema:
    def test_dump(self, decomposition_schema):
        payload = {
            "n": 1,
            "d": 2,
            "method": "auto",
            "local_lower_bounds": 2,
            "boxes": [
                {"lower": [0.0, 1.0], "upper": [math.inf, math.inf]},
                {"lower": [1.0, 0.0], "upper": [math.inf, 1.0]},
            ],
        }
        dumped = decomposition_schema.dump(payload)
        assert dumped["boxes"][0]["upper"] == ["inf", "inf"]
        assert dumped["boxes"][1]["lower"] == [1.0, 0.0]
        assert dumped["local_lower_bounds"] == 2


class TestReportSchemas:
    def test_value(self, value_schema):
        assert value_schema.dump({"quantity": "hv", "value": 5.0}) == {
            "quantity": "hv",
            "value": 5.0,
        }

    def test_mc_report_field_order(self):
        assert list(McReportSchema().fields) == [
            "criterion",
            "exact",
            "estimate",
            "std_error",
            "samples",
            "z_score",
            "seed",
            "workers",
        ]

    def test_history_rows(self):
        rows = HistoryRowSchema(many=True).dump([{"g": 1, "hv": 0.0}, {"g": 2, "hv": 0.5}])
        assert rows == [{"g": 1, "hv": 0.0}, {"g": 2, "hv": 0.5}]
