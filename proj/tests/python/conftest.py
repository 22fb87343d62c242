import os
import shutil

import pytest


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("RBOCOOP_CLI") or shutil.which("rbocoop")
    if not path:
        pytest.skip("rbocoop CLI not available")
    return path
