from __future__ import annotations

import json
import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

import msk
from msk.barcode import Barcode
from msk.complex import MSGraph
from msk.persistence import DecoratedMSGraph
from msk.slices import EmbeddingHistory

DATA = Path(msk.__file__).parent / "data"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=1000,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def load(name: str):
    return json.loads((DATA / name).read_text())


def graph(name: str) -> MSGraph:
    return MSGraph.from_dict(load(f"{name}.graph.json"))


def decorated(name: str) -> DecoratedMSGraph:
    return DecoratedMSGraph.from_dict(load(f"{name}.graph.json"))


def history(name: str) -> EmbeddingHistory:
    return EmbeddingHistory.from_dict(load(f"{name}.history.json"))


def barcode(name: str) -> Barcode:
    return Barcode.from_dict(load(f"{name}.barcode.json"))


@pytest.fixture
def data_dir() -> Path:
    return DATA


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(RESULTS.items()):
        terminalreporter.write_line(line)
