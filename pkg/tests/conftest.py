import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from annokit.uuidgen import UrnMinter  # noqa: E402

GOLDEN_DIR = Path(__file__).parent / "golden"
FIXTURE_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture
def minter():
    return UrnMinter(7)


@pytest.fixture
def golden_dir():
    return GOLDEN_DIR


@pytest.fixture
def fixture_dir():
    return FIXTURE_DIR
