"""Tests for the acceptance-suite service."""

import pytest

from dskplab.services import verify_service
from dskplab.services.verify_service import (
    CHECKS,
    VerifyService,
    one_step_formula,
    run_check,
)


class TestVerifyService:
    """Tests for VerifyService runs."""

    def test_one_step_check(self):
        """Test a single quick check."""
        stats = VerifyService().run("quick", seed=1, only=["one_step_formula"])
        assert stats.checks_run == 1
        assert stats.passed
        record = stats.records[0]
        assert record.criterion == 1
        assert record.details["numerator_monomials"] == 6

    def test_worker_pool(self):
        """Test that worker processes return records in criterion order."""
        stats = VerifyService(workers=2).run(
            "quick", seed=2, only=["aztec_counts", "one_step_formula"]
        )
        assert [r.name for r in stats.records] == ["one_step_formula", "aztec_counts"]
        assert stats.checks_passed == 2
        assert stats.to_dict()["checks"][1]["details"]["A2"] == {
            "configurations": 512,
            "monomials": 220,
        }

    def test_every_criterion_has_a_check(self):
        """Test that the twelve criteria are numbered once each."""
        assert sorted(criterion for criterion, _ in CHECKS.values()) == list(range(1, 13))

    def test_formula_sizes(self):
        """Test the closed one-step numerator and denominator."""
        numerator, denominator = one_step_formula()
        assert len(numerator) == 6
        assert len(denominator) == 6

    def test_errors(self):
        """Test the suite, check and worker validation."""
        with pytest.raises(ValueError, match="Worker count"):
            VerifyService(0)
        with pytest.raises(ValueError, match="Unknown suite"):
            VerifyService().run("full")
        with pytest.raises(ValueError, match="Unknown checks: nope"):
            VerifyService().run("quick", only=["nope"])

    def test_exception_becomes_failed_record(self, monkeypatch):
        """Test that a raising check is recorded, not propagated."""

        def boom(seed, suite):
            raise RuntimeError("broken")

        monkeypatch.setitem(verify_service.CHECKS, "one_step_formula", (1, boom))
        record = run_check("one_step_formula", 1, "quick")
        assert not record.passed
        assert record.error == "RuntimeError: broken"
