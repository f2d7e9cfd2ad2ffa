from __future__ import annotations

import pytest

from fpconv import _kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile the numba kernels once so timings in the suite are not skewed
    _kernels.warmup()
