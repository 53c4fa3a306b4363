import json
from pathlib import Path

import pytest

DATA = Path(__file__).with_name("data")


@pytest.fixture(scope="session")
def oracles():
    """Values frozen by tests/make_oracles.py (mpmath, independent of the package)."""
    return json.loads((DATA / "oracles.json").read_text())
