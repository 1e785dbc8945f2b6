"""Shared fixtures.  The expensive Sod-desk artifacts (FOM snapshot sets,
POD bases) are session-scoped so the unit suite and the acceptance suite
reuse the same runs."""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from eulerrom import inner_products, pod, problems


@pytest.fixture(scope="session")
def sod_desk_cfg():
    return problems.sod_desk()


@pytest.fixture(scope="session")
def sod_desk_snapshots(sod_desk_cfg):
    return problems.run_fom(sod_desk_cfg)


@pytest.fixture(scope="session")
def sod_desk_dim_cfg():
    return problems.sod_desk(dimensional=True)


@pytest.fixture(scope="session")
def sod_desk_dim_snapshots(sod_desk_dim_cfg):
    return problems.run_fom(sod_desk_dim_cfg)


def build_basis(cfg, snapshots, ip_kind, k):
    """POD basis in the given inner product from a snapshot set."""
    spec = inner_products.spec_for_config(ip_kind, cfg, snapshots)
    weight = inner_products.build_weight(spec, cfg.mesh())
    variables = inner_products.VARIABLES_FOR_KIND[ip_kind]
    data = pod.snapshots_in_variables(
        snapshots.matrix, variables, cfg.gas(), cfg.mesh().ncomp
    )
    return pod.compute_pod(data, weight, k, variables), weight


@pytest.fixture(scope="session")
def sod_desk_bases(sod_desk_cfg, sod_desk_snapshots):
    """K=30 bases (and weights) for all four inner products."""
    return {
        kind: build_basis(sod_desk_cfg, sod_desk_snapshots, kind, 30)
        for kind in inner_products.KINDS
    }


@pytest.fixture(scope="session")
def kh_desk_cfg():
    return problems.kh_desk()


@pytest.fixture(scope="session")
def kh_desk_snapshots(kh_desk_cfg):
    return problems.run_fom(kh_desk_cfg)


@pytest.fixture(scope="session")
def kh_desk_dim_cfg():
    return problems.kh_desk(dimensional=True)


@pytest.fixture(scope="session")
def kh_desk_dim_snapshots(kh_desk_dim_cfg):
    return problems.run_fom(kh_desk_dim_cfg)
