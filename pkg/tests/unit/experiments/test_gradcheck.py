"""Tests for the gradient-check target catalogue."""

import pytest

from hetgt.core.errors import GradCheckError
from hetgt.core.models.config import MODEL_KINDS
from hetgt.experiments.commands import cmd_gradcheck
from hetgt.experiments.gradcheck import GRADCHECK_TOLERANCE, CheckOutcome, model_targets, op_targets, run_gradchecks
from hetgt.tensor.tensor import get_precision, inject_backward_fault


class TestTargets:
    def test_every_kind_is_covered(self):
        names = [t.name for t in model_targets()]
        for kind in MODEL_KINDS:
            assert any(name.startswith(f"model:{kind}/") for name in names)
        assert "model:HetGTAN/weighted_sum/L2" in names

    def test_op_names_unique(self):
        names = [t.name for t in op_targets()]
        assert len(names) == len(set(names))
        assert {"op:spmm", "op:segment_softmax", "op:elu"} <= set(names)

    def test_outcome_threshold(self):
        assert CheckOutcome("x", GRADCHECK_TOLERANCE / 2).passed
        assert not CheckOutcome("x", GRADCHECK_TOLERANCE).passed


class TestRunGradchecks:
    def test_all_ops_pass(self):
        outcomes = run_gradchecks(op_targets())
        failed = [(o.name, o.max_error) for o in outcomes if not o.passed]
        assert failed == []

    @pytest.mark.slow
    def test_all_models_pass(self):
        outcomes = run_gradchecks(model_targets())
        assert all(o.passed for o in outcomes), [(o.name, o.max_error) for o in outcomes]

    def test_precision_restored(self):
        before = get_precision()
        run_gradchecks([op_targets()[0]])
        assert get_precision() == before

    def test_fault_is_detected(self):
        targets = [t for t in op_targets() if t.name == "op:matmul"]
        with inject_backward_fault("matmul", 1.5):
            (outcome,) = run_gradchecks(targets)
        assert outcome.max_error > 1e-2


class TestCmdGradcheck:
    def test_corrupt_op_raises(self, capsys):
        with pytest.raises(GradCheckError) as excinfo:
            cmd_gradcheck("matmul")
        assert excinfo.value.exit_code == 5
        assert "FAIL op:matmul" in capsys.readouterr().out
