import subprocess
import sys
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def validate_artifacts(tmp_path_factory) -> Path:
    """Outputs of a real `lindrad validate` run (the primary's CLI surface)."""
    out = tmp_path_factory.mktemp("validate_run")
    proc = subprocess.run(
        [sys.executable, "-m", "lindrad.cli", "validate", "--out", str(out), "--quiet"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    art = out / "validate_artifacts"
    assert art.is_dir()
    return art
