import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from primediff.arith import build_tables


@pytest.fixture(scope="session")
def tables_small():
    return build_tables(20_000)


@pytest.fixture(scope="session")
def tables_million():
    return build_tables(1_000_002)
