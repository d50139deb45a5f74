from __future__ import annotations

import sys

import pytest
from hypothesis import strategies as st

from jumpcoh.forms import LieModel
from jumpcoh.modelio import bundled_model
from jumpcoh.scalars import GaussianRational

CLASS_I = (0, 0, 0, 0, 1, 0)
CLASS_II = (1, 0, 0, 0, 0, 0)
CLASS_III = (1, 0, 0, 1, 0, 0)


@pytest.fixture(scope="session")
def iwasawa():
    model, deformations = bundled_model()
    return model, deformations[0]


@pytest.fixture(scope="session")
def filiform4():
    # [θ1,θ2]=θ3, [θ1,θ3]=θ4
    return LieModel.from_triples(4, [(1, 2, 3, 1), (1, 3, 4, 1)], "filiform4")


small_ints = st.integers(min_value=-6, max_value=6)


@st.composite
def gaussians(draw, allow_zero=True):
    den = draw(st.integers(min_value=1, max_value=5))
    value = GaussianRational(draw(small_ints), draw(small_ints)) / den
    if not allow_zero and not value:
        value = GaussianRational(1)
    return value


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.report_lines():
        terminalreporter.write_line(line)
