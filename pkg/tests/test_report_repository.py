"""Tests for the report entity and its JSON repository (on a fake filesystem)."""

from pathlib import Path

import pytest

from pyshifts.domain import Report
from pyshifts.repositories import InMemoryReportRepository, JsonReportRepository, dump_report


def _create_report(status: str = "pass") -> Report:
    """Helper to create a report whose entries are already JSON-ready."""
    return Report(
        command="classify",
        scenario="classical-dilation",
        scenario_hash="0" * 64,
        seed=3,
        mode="exact",
        status=status,
        entries=({"kind": "verdict", "verdict": "NotChainRecurrent", "bound": "1"},),
        notes=("checked",),
    )


class TestReport:
    """Test report validation and its JSON form."""

    def test_status_is_validated(self) -> None:
        with pytest.raises(ValueError, match="status must be one of"):
            _create_report(status="maybe")

    def test_passed(self) -> None:
        assert _create_report().passed
        assert not _create_report("fail").passed

    def test_json_round_trip(self) -> None:
        report = _create_report()
        assert Report.from_json(report.to_json()) == report

    def test_schema_version_is_checked(self) -> None:
        doc = {**_create_report().to_json(), "schema_version": 99}
        with pytest.raises(ValueError, match="schema version"):
            Report.from_json(doc)

    def test_dump_is_sorted_and_terminated(self) -> None:
        text = dump_report(_create_report())
        assert text.endswith("}\n")
        assert text.index('"command"') < text.index('"entries"') < text.index('"status"')


class TestJsonReportRepository:
    """Test saving and loading report files."""

    def test_save_and_load(self, fs) -> None:
        repo = JsonReportRepository(Path("/reports"))
        repo.save("runs/dilation.json", _create_report())
        assert repo.exists("runs/dilation.json")
        assert Path("/reports/runs/dilation.json").read_text(encoding="utf-8") == dump_report(
            _create_report()
        )
        assert repo.load("runs/dilation.json") == _create_report()

    def test_missing_report(self, fs) -> None:
        repo = JsonReportRepository(Path("/reports"))
        assert repo.load("nothing.json") is None
        assert not repo.exists("nothing.json")

    def test_corrupt_report(self, fs) -> None:
        fs.create_file("/reports/bad.json", contents="{not json")
        with pytest.raises(OSError, match="Failed to load report"):
            JsonReportRepository(Path("/reports")).load("bad.json")

    def test_unwritable_location(self, fs) -> None:
        fs.create_file("/reports/blocker")
        with pytest.raises(OSError, match="Failed to save report"):
            JsonReportRepository(Path("/reports")).save("blocker/r.json", _create_report())


class TestInMemoryReportRepository:
    """Test the dict-backed repository."""

    def test_save_and_load(self) -> None:
        repo = InMemoryReportRepository()
        report = _create_report()
        repo.save("a", report)
        assert repo.exists("a")
        assert repo.load("a") is report
        assert repo.load("b") is None
