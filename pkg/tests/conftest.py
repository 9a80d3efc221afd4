"""Shared scenario builders and session-scoped trajectories.

The expensive runs (128-point varying density) happen once per session; tests
that need them share the cached Trajectory objects and their wall times.
"""

import time

import numpy as np
import pytest

import krflow as kf
from krflow.flow import IntegratorSettings


def homogeneous_scenario(t_max=10.0, resolution=16, active_axes=(0,), gauge="u",
                         sample_dt=0.05, name="homog", **integ):
    grid = kf.PeriodicGrid(n=2, active_axes=active_axes, resolution=resolution)
    return kf.Scenario(
        n=2, grid=grid,
        L=kf.CohomologyClass(np.diag([1.0, 0.0])),
        omega0=kf.CohomologyClass(np.eye(2)),
        rho=grid.constant(1.0), gauge=gauge, t_max=t_max, sample_dt=sample_dt,
        integrator=IntegratorSettings(**integ), name=name)


def kahler_scenario(t_max=10.0, resolution=16, name="kahler"):
    grid = kf.PeriodicGrid(n=2, active_axes=(0,), resolution=resolution)
    return kf.Scenario(
        n=2, grid=grid,
        L=kf.CohomologyClass(np.eye(2)),
        omega0=kf.CohomologyClass(2.0 * np.eye(2)),
        rho=grid.constant(1.0), t_max=t_max, name=name)


def varying_scenario(t_max=12.0, resolution=128, backend="spectral", gauge="u",
                     rho_scale=1.0, sample_dt=0.05, name="vary", **integ):
    grid = kf.PeriodicGrid(n=2, active_axes=(0,), resolution=resolution,
                           backend=backend)
    x = grid.coordinate(0)
    raw = np.exp(0.3 * np.cos(x))
    rho = kf.ScalarField(grid, rho_scale * raw / raw.mean())
    return kf.Scenario(
        n=2, grid=grid,
        L=kf.CohomologyClass(np.diag([1.0, 0.0])),
        omega0=kf.CohomologyClass(np.eye(2)),
        rho=rho, gauge=gauge, t_max=t_max, sample_dt=sample_dt,
        integrator=IntegratorSettings(**integ), name=name)


def timed_run(scenario):
    t0 = time.perf_counter()
    traj = kf.run(scenario)
    return traj, time.perf_counter() - t0


@pytest.fixture(scope="session")
def homog_traj_10():
    return timed_run(homogeneous_scenario(t_max=10.0))


@pytest.fixture(scope="session")
def homog_traj_14():
    return timed_run(homogeneous_scenario(t_max=14.0))


@pytest.fixture(scope="session")
def kahler_traj_10():
    return timed_run(kahler_scenario(t_max=10.0))


@pytest.fixture(scope="session")
def kahler_traj_14():
    return timed_run(kahler_scenario(t_max=14.0))


@pytest.fixture(scope="session")
def trivial_traj():
    grid = kf.PeriodicGrid(n=2, active_axes=(0,), resolution=16)
    sc = kf.Scenario(n=2, grid=grid, L=kf.CohomologyClass(np.eye(2)),
                     omega0=kf.CohomologyClass(np.eye(2)),
                     rho=grid.constant(1.0), t_max=10.0, name="kahler_trivial")
    return timed_run(sc)


@pytest.fixture(scope="session")
def vary_traj_10():
    return timed_run(varying_scenario(t_max=10.0, name="vary10"))


@pytest.fixture(scope="session")
def vary_traj_14():
    return timed_run(varying_scenario(t_max=14.0, name="vary14"))
