import sys

import numpy as np
from hypothesis import settings, strategies as st

from carathedyn.config import FIXTURE_NAMES

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

seeds = st.integers(0, 2**32 - 1)
fixture_names = st.sampled_from(FIXTURE_NAMES)


def rng_of(seed):
    return np.random.default_rng(seed)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
