from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from chaoslab.campaigns import CampaignTask, resolve_workers, run_campaign, run_instance
from chaoslab.chaos import ChaosElement
from chaoslab.config import CampaignConfig, Caps
from chaoslab.exceptions import InputError
from chaoslab.polarization import OptimizerSettings
from chaoslab.reports import Arithmetic, InequalityId, Status, summarize, write_reports_json


def campaign(kind: str, instances: int = 4, **overrides: object) -> CampaignConfig:
    fields: dict = {
        "kind": kind,
        "instances": instances,
        "seed": 7,
        "max_dim": 3,
        "max_degree": 3,
        "ambient_dim": None,
        "arithmetic": "exact",
    }
    fields.update(overrides)
    return CampaignConfig(**fields)


def test_hgp_campaign_has_no_violations() -> None:
    reports = run_campaign(CampaignTask(campaign("hgp", 6), Caps()))
    summary = summarize(reports)
    assert summary.instances == 6
    assert summary.violations == 0
    assert reports[0].status is Status.EQUALITY


def test_campaigns_are_deterministic() -> None:
    task = CampaignTask(campaign("main", 3, max_dim=2, max_degree=2), Caps())
    assert run_campaign(task) == run_campaign(task)
    assert run_instance(task, 2) == run_campaign(task)[2]


@pytest.mark.parametrize("kind", ["frenkel", "averaged", "gpc", "complex", "negatif"])
def test_every_kind_runs(kind: str) -> None:
    reports = run_campaign(CampaignTask(campaign(kind, 2, max_dim=2, max_degree=2, moments=(2,)), Caps()))
    assert len(reports) == 2
    assert summarize(reports).violations == 0


def test_phi_fixture() -> None:
    task = CampaignTask(campaign("phi", 2), Caps(), fixture="h1-pair")
    reports = run_campaign(task)
    assert all(report.inequality_id is InequalityId.PHI_MONOTONE for report in reports)
    assert all(report.status is Status.HOLDS for report in reports)


def test_float_arithmetic() -> None:
    reports = run_campaign(CampaignTask(campaign("hgp", 3, arithmetic="float"), Caps()))
    assert all(report.arithmetic is Arithmetic.FLOAT for report in reports)
    assert summarize(reports).violations == 0


def test_task_validation() -> None:
    with pytest.raises(InputError):
        CampaignTask(campaign("hgp"), Caps(), fixture="h1-pair")
    with pytest.raises(InputError):
        CampaignTask(campaign("main", arithmetic="float"), Caps())
    with pytest.raises(InputError):
        CampaignTask(campaign("hgp", 0), Caps())
    pair = (ChaosElement.hermite(1, 0, 1), ChaosElement.hermite(1, 0, 1))
    with pytest.raises(InputError):
        CampaignTask(campaign("hgp"), Caps(), family=pair)
    with pytest.raises(InputError):
        CampaignTask(campaign("phi"), Caps(), fixture="h1-pair", family=pair)


def test_family_replaces_random_draws() -> None:
    pair = (ChaosElement.hermite(2, 0, 1), ChaosElement.hermite(2, 1, 1))
    reports = run_campaign(CampaignTask(campaign("main", 3), Caps(), family=pair))
    assert all(report.status is Status.EQUALITY for report in reports)
    assert len({report.inputs_digest for report in reports}) == 1


def test_worker_resolution(mocker: MockerFixture) -> None:
    assert resolve_workers(3) == 3
    mocker.patch("chaoslab.campaigns.psutil.cpu_count", return_value=None)
    assert resolve_workers(0) == 1
    with pytest.raises(InputError):
        resolve_workers(-1)


def test_large_hgp_campaign_is_clean() -> None:
    reports = run_campaign(CampaignTask(campaign("hgp", 200), Caps()))
    summary = summarize(reports)
    assert summary.instances == 200
    assert summary.violations == 0
    assert not summary.findings


@pytest.mark.parametrize("kind", ["main", "phi", "negatif"])
def test_fifty_family_campaigns_are_clean(kind: str) -> None:
    reports = run_campaign(CampaignTask(campaign(kind, 50, ambient_dim=3), Caps()))
    assert len(reports) == 50
    assert summarize(reports).violations == 0


def test_complex_campaign_is_clean() -> None:
    reports = run_campaign(CampaignTask(campaign("complex", 100, max_degree=2), Caps()))
    assert all(report.inequality_id is InequalityId.COMPLEX for report in reports)
    assert summarize(reports).violations == 0


def test_polarization_campaign() -> None:
    task = CampaignTask(
        campaign("polarization", 20, max_dim=4),
        Caps(),
        optimizer=OptimizerSettings(restarts=4, max_iter=300),
    )
    reports = run_campaign(task)
    assert all(report.inequality_id is InequalityId.POLARIZATION for report in reports)
    assert summarize(reports).violations == 0


def test_parallel_reports_are_byte_identical(tmp_path: Path) -> None:
    task = CampaignTask(campaign("main", 6, max_dim=2, max_degree=2), Caps())
    serial = run_campaign(task, workers=1)
    parallel = run_campaign(task, workers=2)
    assert parallel == serial
    write_reports_json(tmp_path / "serial.json", serial)
    write_reports_json(tmp_path / "parallel.json", parallel)
    assert (tmp_path / "serial.json").read_bytes() == (tmp_path / "parallel.json").read_bytes()
