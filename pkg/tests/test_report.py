"""
Tests for the report module.
"""

import math

import pytest

from freeregress.report import IdentityCheck, IdentityReport


@pytest.fixture
def report():
    """A report with one passing and one failing identity."""
    report = IdentityReport(command="verify thm1", params={"sigma": 1.0})
    report.add("mean_regression", [1e-15, -2e-14], 1e-8)
    report.add_scalar("inverse_regression", 0.5, 1e-8)
    return report


def test_residuals_are_absolute():
    """Test that residuals are stored as absolute floats."""
    check = IdentityCheck("eq", [-3, 2], 1.0)
    assert check.residuals == (3.0, 2.0)
    assert check.residual_max == 3.0
    assert not check.passed


def test_negative_controls_pass_on_large_residuals():
    """Test the reversed pass rule of a negative control."""
    assert IdentityCheck("control", [0.2], 1e-3, expect_zero=False).passed
    assert not IdentityCheck("control", [1e-6], 1e-3, expect_zero=False).passed


def test_nan_never_passes():
    """Test that a NaN residual fails in both directions."""
    assert not IdentityCheck("eq", [math.nan], 1.0).passed
    assert not IdentityCheck("eq", [math.nan], 1.0, expect_zero=False).passed


def test_empty_residuals_are_rejected():
    """Test that an identity needs at least one residual."""
    with pytest.raises(ValueError, match="no residuals"):
        IdentityCheck("eq", [], 1.0)


def test_report_order_and_lookup(report):
    """Test that identities keep insertion order and can be looked up by name."""
    assert report.names() == ["mean_regression", "inverse_regression"]
    assert report["mean_regression"].passed
    assert [check.name for check in report.failures()] == ["inverse_regression"]
    assert not report.all_passed
    with pytest.raises(KeyError):
        report["missing"]


def test_duplicate_names(report):
    """Test that identity names are unique within a report."""
    with pytest.raises(ValueError, match="Duplicate identity name"):
        report.add("mean_regression", [0.0], 1e-8)


def test_extend_with_prefix(report):
    """Test that merged checks keep their pass rule under a prefix."""
    other = IdentityReport(command="verify prop31", params={})
    other.add("control", [1.0], 1e-3, expect_zero=False, note="shifted")
    other.notes.append("merged")
    report.extend(other, prefix="p31.")
    assert report.names()[-1] == "p31.control"
    assert report["p31.control"].passed
    assert report.notes == ["merged"]


def test_to_dict(report):
    """Test the canonical report shape."""
    report.seed = 7
    report.result = {"lambda": 3.0}
    data = report.to_dict(wall_time_ms=12.5)
    assert data["command"] == "verify thm1"
    assert data["seed"] == 7
    assert data["wall_time_ms"] == 12.5
    assert data["result"] == {"lambda": 3.0}
    assert data["identities"][1] == {"name": "inverse_regression", "residual_max": 0.5, "pass": False}
    assert "notes" not in data
