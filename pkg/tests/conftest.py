import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from modalctx.enumeration import closed_k_terms  # noqa: E402


@pytest.fixture(scope="session")
def k_terms():
    """Closed well-typed K terms of size at most 8 over one base type."""
    return closed_k_terms(8)
