"""Tests for the error hierarchy and exit codes."""

import pytest

from hetgt.core.errors import (
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_GRADCHECK,
    EXIT_NUMERICAL,
    ConfigError,
    ContractError,
    DataError,
    DimensionError,
    GradCheckError,
    HetGTError,
    NumericalError,
    RangeError,
    StructuralError,
)


class TestExitCodes:
    @pytest.mark.parametrize(
        ("error", "code"),
        [
            (ConfigError("x"), EXIT_CONFIG),
            (DataError("x"), EXIT_DATA),
            (NumericalError("x"), EXIT_NUMERICAL),
            (GradCheckError("x"), EXIT_GRADCHECK),
            (ContractError("x"), 1),
        ],
    )
    def test_codes(self, error, code):
        assert isinstance(error, HetGTError)
        assert error.exit_code == code

    def test_contract_family_are_value_errors(self):
        for cls in (DimensionError, ContractError, StructuralError):
            assert issubclass(cls, ValueError)
        assert issubclass(RangeError, IndexError)


class TestMessages:
    def test_config_error_location(self):
        assert str(ConfigError("bad", path="cfg.json", line=3)) == "cfg.json:3: bad"
        assert str(ConfigError("bad", path="cfg.json")) == "cfg.json: bad"
        assert str(ConfigError("bad")) == "bad"

    def test_data_error_location(self):
        err = DataError("bad value", file="labels.csv", row=7)
        assert str(err) == "labels.csv (row 7): bad value"
        assert (err.file, err.row) == ("labels.csv", 7)

    def test_numerical_error_locate(self):
        err = NumericalError("Non-finite output", op="matmul")
        located = err.locate(layer=2, edge_type="A-P")
        assert str(located) == "Non-finite output [op=matmul layer=2 edge_type=A-P]"
        assert (located.op, located.layer, located.edge_type) == ("matmul", 2, "A-P")

    def test_locate_keeps_existing_fields(self):
        err = NumericalError("x", op="spmm", layer=1, edge_type="S-P").locate(layer=3)
        assert (err.layer, err.edge_type) == (3, "S-P")
