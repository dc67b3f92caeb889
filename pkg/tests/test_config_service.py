"""
실행 설정 파싱 테스트
"""

import json

import pytest

from reputation.service.config_service import load_config, parse_config
from reputation.utils.config import get_settings
from reputation.utils.error_handler import ConfigSchemaError, ConfigValidationError
from tests.conftest import FIG1


def test_flat_model_document_fills_defaults():
    config = parse_config(json.dumps(FIG1))
    assert config.model.q == 0.75
    assert config.solver.m == 50
    assert config.solver.epsilon == 0.0
    assert config.solver.tol == 1e-10
    assert config.model.tie_break == "buy"


def test_nested_and_dotted_sections():
    nested = parse_config(json.dumps({"model": FIG1, "solver": {"m": 10}, "sim": {"seed": 3}}))
    dotted = parse_config(
        json.dumps({**{f"model.{k}": v for k, v in FIG1.items()}, "solver.m": 10, "sim.seed": 3})
    )
    assert nested.model_dump() == dotted.model_dump()
    assert dotted.solver.m == 10


def test_invalid_precision_names_constraint():
    with pytest.raises(ConfigValidationError) as exc_info:
        parse_config(json.dumps({**FIG1, "q": 0.5}))
    assert "1/2 < q < 1" in exc_info.value.message
    assert exc_info.value.exit_status == 2


@pytest.mark.parametrize(
    "document, field",
    [
        ({**FIG1, "solver.mm": 5}, "solver.mm"),
        ({**FIG1, "extra_section": {}}, "extra_section"),
        ({"model": {**FIG1, "qq": 0.7}}, "model.qq"),
    ],
)
def test_unknown_keys_are_rejected(document, field):
    with pytest.raises(ConfigSchemaError) as exc_info:
        parse_config(json.dumps(document))
    assert field in exc_info.value.message


def test_missing_model_section():
    with pytest.raises(ConfigSchemaError):
        parse_config(json.dumps({"solver": {"m": 10}}))


def test_malformed_json():
    with pytest.raises(ConfigSchemaError):
        parse_config("{not json")


def test_invalid_solver_option():
    with pytest.raises(ConfigValidationError) as exc_info:
        parse_config(json.dumps({**FIG1, "solver.epsilon": 0.7}))
    assert "solver.epsilon" in exc_info.value.message


def test_seed_override(write_config):
    path = write_config({**FIG1, "sim.seed": 1})
    assert load_config(path, seed=9).sim.seed == 9
    assert load_config(path).sim.seed == 1


def test_missing_file():
    with pytest.raises(ConfigSchemaError):
        load_config("/nonexistent/config.json")


@pytest.mark.parametrize(
    "text",
    [
        '{"v": 1.0, "p": 0.4, "model.q": 0.75, "q": 0.8, "c": 0.22, "delta": 0.92}',
        '{"v": 1.0, "p": 0.4, "q": 0.8, "model.q": 0.75, "c": 0.22, "delta": 0.92}',
        '{"model": {"v": 1.0, "p": 0.4, "q": 0.75, "c": 0.22, "delta": 0.92}, "q": 0.8}',
        '{"q": 0.8, "model": {"v": 1.0, "p": 0.4, "q": 0.75, "c": 0.22, "delta": 0.92}}',
    ],
)
def test_duplicate_model_key_is_rejected(text):
    with pytest.raises(ConfigSchemaError) as exc_info:
        parse_config(text)
    assert "model.q" in exc_info.value.message


def test_output_format_defaults_to_settings():
    config = parse_config(json.dumps(FIG1))
    assert config.output.format == get_settings().DEFAULT_FORMAT == "both"
    explicit = parse_config(json.dumps({**FIG1, "output.format": "csv"}))
    assert explicit.output.format == "csv"
