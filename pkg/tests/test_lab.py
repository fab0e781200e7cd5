import asyncio

import numpy as np
import pytest

from desync_lab import DesyncLab, SimConfig, SyncDesyncLab
from desync_lab.core import PerceptionMatrix
from desync_lab.errors import ConfigError, DomainError, StorageError, UnsupportedSizeError
from desync_lab.spectral import Verdict


def test_requires_init():
    lab = DesyncLab()
    with pytest.raises(RuntimeError, match="not initialized"):
        lab.spectral


def test_async_workflow():
    async def scenario():
        async with DesyncLab(period=1000.0) as lab:
            gaps = await lab.model.gaps_from_phases([900.0, 100.0, 500.0])
            topology = await lab.model.topology("star", 8)
            perception = await lab.model.perception(topology)
            masks = await lab.dynamics.force_masks(perception, 0)
            report = await lab.spectral.report(8, "star")
            forces = await lab.dynamics.total_forces(await lab.model.equilibrium(8), perception)
            return gaps, masks, report, forces

    gaps, masks, report, forces = asyncio.run(scenario())
    assert gaps.as_tuple() == pytest.approx((200.0, 400.0, 400.0))
    assert masks.weights("negative").tolist() == [2, 0, -1]
    assert report.verdict is Verdict.STABLE
    assert all(abs(force.value) < 1e-12 for force in forces)


def test_concurrent_batch_keeps_order():
    configs = [SimConfig(mode="multi-hop", n=n, rounds=10, perturbation=2.0) for n in (6, 7, 8, 9)]

    async def scenario():
        async with DesyncLab(max_workers=2) as lab:
            return await lab.simulation.run_batch(configs)

    results = asyncio.run(scenario())
    assert [result.n for result in results] == [6, 7, 8, 9]


def test_sweep_reports():
    async def scenario():
        async with DesyncLab() as lab:
            return await lab.spectral.sweep([6, 8, 10], "general", lambda n: PerceptionMatrix.full(n))

    reports = asyncio.run(scenario())
    assert [report.n for report in reports] == [6, 8, 10]
    assert all(report.margin > 0 for report in reports)


def test_errors_pass_through():
    async def scenario():
        async with DesyncLab() as lab:
            with pytest.raises(UnsupportedSizeError):
                await lab.jacobians.star(7)
            with pytest.raises(DomainError):
                await lab.model.perturbed(4, node=9, magnitude=1.0)
            with pytest.raises(ConfigError):
                await lab.model.topology("ring")
            with pytest.raises(StorageError):
                await lab.model.topology("/nonexistent/topology.json")

    asyncio.run(scenario())


def test_sync_lab(tmp_path):
    with SyncDesyncLab(period=1000.0) as lab:
        error = lab.jacobians.check_single_hop(8)
        poly = lab.spectral.char_poly(6)
        stepped = lab.dynamics.step_single_hop(lab.model.perturbed(6, node=1, magnitude=3.0))
        result = lab.simulation.run(SimConfig(mode="single-hop", n=6, rounds=12, perturbation=3.0))
        path = lab.simulation.export(result, tmp_path / "run.json")
        thresholds = lab.spectral.thresholds()
    assert error < 1e-5
    assert poly.coefficients[3] == 0.0
    assert abs(np.sum(stepped.gaps) - 1000.0) < 1e-9
    assert path.exists()
    assert thresholds.max_nodes()["star_gershgorin"] > 200000
    assert not hasattr(lab, "spectral")


def test_sync_lab_refuses_running_loop():
    async def scenario():
        with SyncDesyncLab():
            pass

    with pytest.raises(RuntimeError, match="event loop"):
        asyncio.run(scenario())


def test_finite_difference_through_lab():
    with SyncDesyncLab() as lab:
        perception = PerceptionMatrix.full(6)
        gaps = lab.model.perturbed(6, node=2, magnitude=4.0)
        analytic = lab.jacobians.multihop(perception, gaps)
        numeric = lab.jacobians.finite_difference_multihop(gaps, perception)
    np.testing.assert_allclose(numeric.entries, analytic.entries, atol=1e-5)
