"""
Tests for run configurations and report records.
"""

import json
import math
from pathlib import Path

import pytest
from pydantic import ValidationError

from qpcocycle.schemas.config import (
    AccelConfig,
    DualityConfig,
    LeConfig,
    RegionConfig,
    SpectrumConfig,
    SweepConfig,
    VerifyConfig,
)
from qpcocycle.schemas.report import FAIL, INFO, PASS, SCHEMA_VERSION, CheckRow, ReportRecord
from qpcocycle.services.commands import COMMANDS, cmd_duality, cmd_le, cmd_region, cmd_verify
from qpcocycle.utils.output import render_report

SCHEMA_FILE = Path(__file__).resolve().parents[1] / "docs" / "report.schema.json"


class TestRunConfigs:
    def test_harper_defaults(self):
        """Aliases are accepted and couplings are normalized."""
        config = LeConfig(**{"lambda": " 0, 0.5 ,0 "})
        assert config.coupling == "0,0.5,0"
        assert config.model == "harper"
        assert config.energy == "mid"
        assert config.which == "B"
        assert config.backend == "iterative"

    def test_normalized_form_validates_to_same_config(self):
        """The dumped form of a config validates back to the same config."""
        config = LeConfig(**{"lambda": "0.5,0.2,0.2", "E": 0.3, "beta": "2/5", "backend": "rational"})
        dumped = config.model_dump(mode="json", by_alias=True, exclude_none=True)
        assert dumped["lambda"] == "0.5,0.2,0.2"
        assert dumped["E"] == 0.3
        assert LeConfig.model_validate(dumped) == config

    def test_matrix_model_is_inferred(self):
        """A matrix without a model means the matrix model."""
        config = LeConfig(matrix={"matrix": [[1, 0], [0, 1]]})
        assert config.model == "matrix"

    def test_sweep_defaults_to_polynomial_cocycle(self):
        """Sweeps default to cocycle A and the grid [-0.5, 0.5] with 41 points."""
        config = SweepConfig(**{"lambda": "0,0.5,0"})
        assert config.which == "A"
        assert (config.eps_min, config.eps_max, config.steps) == (-0.5, 0.5, 41)

    @pytest.mark.parametrize(
        "cls,payload",
        [
            (LeConfig, {}),
            (LeConfig, {"model": "matrix", "lambda": "0,0.5,0"}),
            (LeConfig, {"lambda": "1,2"}),
            (LeConfig, {"lambda": "-1,1,1"}),
            (LeConfig, {"lambda": "0,0.5,0", "beta": "pi"}),
            (LeConfig, {"lambda": "0,0.5,0", "backend": "rational"}),
            (LeConfig, {"lambda": "0,0.5,0", "n": 0}),
            (LeConfig, {"lambda": "0,0.5,0", "colour": "blue"}),
            (SweepConfig, {"lambda": "0,0.5,0", "eps_min": 0.5, "eps_max": 0.5}),
            (SweepConfig, {"lambda": "0,0.5,0", "steps": 2}),
            (AccelConfig, {"lambda": "0,0.5,0", "at": []}),
            (SpectrumConfig, {"lambda": "0,0.5,0", "method": "floquet"}),
            (SpectrumConfig, {"lambda": "0,0.5,0", "N": 10}),
            (RegionConfig, {}),
            (DualityConfig, {"lambda": "0,0.5,0", "mid_bands": 0}),
            (VerifyConfig, {"panel": "everything"}),
        ],
    )
    def test_invalid(self, cls, payload):
        """Violated preconditions are validation errors."""
        with pytest.raises(ValidationError):
            cls.model_validate(payload)

    def test_floquet_with_rational_beta(self):
        """Floquet spectra accept a rational frequency."""
        config = SpectrumConfig(**{"lambda": "0,0.5,0", "method": "floquet", "beta": "3/5"})
        assert config.method == "floquet"


class TestReport:
    def test_judge(self):
        """PASS iff |computed - target| < tolerance."""
        assert CheckRow.judge("p", "c", 1.0, 1.005, 0.01).status == PASS
        assert CheckRow.judge("p", "c", 1.0, 1.02, 0.01).status == FAIL
        assert CheckRow.judge("p", "c", 1.0, math.nan, 0.01).status == FAIL

    def test_decreasing(self):
        """Every step must shrink, up to the relative slack and the absolute resolution."""
        assert CheckRow.decreasing("p", "c", [0.4, 0.2, 0.1]).status == PASS
        assert CheckRow.decreasing("p", "c", [0.4, 0.2, 0.1]).computed <= 0.0
        assert CheckRow.decreasing("p", "c", [0.4, 0.42], slack=0.1).status == PASS
        assert CheckRow.decreasing("p", "c", [0.001, 0.004], resolution=5e-3).status == PASS

    def test_decreasing_rejects_a_rise(self):
        """A sequence that rises in the middle fails even when the last value is the smallest."""
        row = CheckRow.decreasing("continuity", "distances", [0.4, 0.1, 0.3, 0.05], slack=0.1)
        assert row.status == FAIL
        assert row.computed == pytest.approx(0.3 - 1.1 * 0.1)

    @pytest.mark.parametrize("values", [[0.4, math.nan, 0.1], [0.3], []])
    def test_decreasing_needs_two_finite_values(self, values):
        """NaN entries and sequences shorter than two fail."""
        row = CheckRow.decreasing("p", "c", values)
        assert row.status == FAIL
        assert math.isnan(row.computed)

    def test_failed(self):
        """A report fails once any row fails."""
        rows = [CheckRow(panel="p", check="a", status=INFO).model_dump()]
        report = ReportRecord(command="verify", rows=rows)
        assert report.schema_version == SCHEMA_VERSION
        assert not report.failed
        report.rows.append(CheckRow.judge("p", "b", 0.0, 1.0, 0.5).model_dump())
        assert report.failed

    def test_published_schema_matches_model(self):
        """docs/report.schema.json lists exactly the report fields."""
        schema = json.loads(SCHEMA_FILE.read_text(encoding="utf-8"))
        assert set(schema["required"]) == set(ReportRecord.model_fields)
        assert set(schema["properties"]) == set(ReportRecord.model_fields)
        assert schema["properties"]["schema_version"]["const"] == SCHEMA_VERSION
        assert set(schema["$defs"]["CheckRow"]["properties"]) == set(CheckRow.model_fields)


JSON_TYPES = {
    "object": dict,
    "array": list,
    "string": str,
    "number": (int, float),
    "boolean": bool,
    "null": type(None),
}


def _declared_types(prop):
    """JSON types a property schema admits, from "type", "anyOf" or a string enum."""
    if "anyOf" in prop:
        return set().union(*(_declared_types(p) for p in prop["anyOf"]))
    if "type" in prop:
        kind = prop["type"]
        return set(kind) if isinstance(kind, list) else {kind}
    if "enum" in prop and all(isinstance(v, str) for v in prop["enum"]):
        return {"string"}
    return set()


def _matches(value, prop):
    if "const" in prop and value != prop["const"]:
        return False
    if "enum" in prop and value not in prop["enum"]:
        return False
    kinds = _declared_types(prop)
    if not kinds:
        return True
    if isinstance(value, bool):
        return "boolean" in kinds
    return any(isinstance(value, JSON_TYPES[k]) for k in kinds)


def _assert_conforms(payload, schema):
    assert set(payload) == set(schema["required"]) == set(schema["properties"])
    for key, prop in schema["properties"].items():
        assert _matches(payload[key], prop), (key, payload[key])
    item = schema["properties"]["rows"]["items"]
    assert all(_matches(row, item) for row in payload["rows"])


@pytest.fixture(scope="module")
def published():
    return json.loads(SCHEMA_FILE.read_text(encoding="utf-8"))


class TestPublishedSchema:
    def test_check_row_matches_model_schema(self, published):
        """Field types, required fields and status values agree with the pydantic model."""
        documented = published["$defs"]["CheckRow"]
        generated = CheckRow.model_json_schema()
        assert set(documented["required"]) == set(generated["required"])
        assert set(documented["properties"]) == set(generated["properties"])
        for name, prop in documented["properties"].items():
            assert _declared_types(prop) == _declared_types(generated["properties"][name]), name
        assert documented["properties"]["status"]["enum"] == generated["properties"]["status"]["enum"]

    def test_report_fields_match_model_schema(self, published):
        """Top-level fields and their JSON types agree with the pydantic model."""
        generated = ReportRecord.model_json_schema()
        assert set(published["properties"]) == set(generated["properties"])
        for name in ("command", "inputs", "outputs", "rows", "diagnostics"):
            assert _declared_types(published["properties"][name]) == _declared_types(
                generated["properties"][name]
            ), name
        assert set(published["properties"]["command"]["enum"]) == set(COMMANDS)

    @pytest.mark.parametrize(
        "command,config",
        [
            (cmd_region, RegionConfig(**{"lambda": "0,0.5,0"})),
            (cmd_duality, DualityConfig(**{"lambda": "1/2,1/5,1/5"})),
            (cmd_le, LeConfig(matrix={"matrix": [[2, 0], [0, 1]]}, beta="1/3", backend="rational")),
            (cmd_le, LeConfig(matrix={"matrix": [[2, 0], [0, 1]]}, n=16, phases=2)),
        ],
    )
    def test_rendered_reports_conform(self, published, command, config):
        """A rendered command report satisfies docs/report.schema.json."""
        payload = json.loads(render_report(command(config, threads=1)))
        _assert_conforms(payload, published)

    def test_verify_rows_conform(self, published):
        """Every verification row is a CheckRow as documented."""
        payload = json.loads(render_report(cmd_verify(VerifyConfig(panel="jensen", quick=True), threads=1)))
        _assert_conforms(payload, published)
        documented = published["$defs"]["CheckRow"]
        assert payload["rows"]
        for row in payload["rows"]:
            assert set(documented["required"]) <= set(row) <= set(documented["properties"])
            for name, value in row.items():
                assert _matches(value, documented["properties"][name]), (name, value)
            CheckRow.model_validate(row)
