"""Shared fixtures: catalog entries are expensive enough to build once."""

from __future__ import annotations

import pytest

from cpgeo import build_example


@pytest.fixture(scope="session")
def nilpotent6():
    return build_example("nilpotent6")


@pytest.fixture(scope="session")
def heisenberg():
    return build_example("heisenberg_vaisman")


@pytest.fixture(scope="session")
def flat_e2r():
    return build_example("flat_e2r")


@pytest.fixture(scope="session")
def flat_e2r2():
    return build_example("flat_e2r2")


@pytest.fixture(scope="session")
def darboux10():
    return build_example("darboux", h=1, k=0)


@pytest.fixture(scope="session")
def darboux10_polarized(darboux10):
    return darboux10.with_polarized_metric()
