import json
import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"

CASES = [
    ("rp_pi1.py", ["--n-max", "3"]),
    ("spn_patterns.py", ["--n", "4"]),
    ("braid_oracle.py", ["--pairs", "50", "--samples", "20", "--n-max", "4"]),
    ("cosheaf_roundtrips.py", ["--instances", "10", "--poset-max", "4"]),
]


@pytest.mark.parametrize("script,args", CASES)
def test_script_runs(script, args):
    res = subprocess.run([sys.executable, str(SCRIPTS / script), *args], capture_output=True, text=True, timeout=120)
    assert res.returncode == 0, res.stderr
    out = json.loads(res.stdout)
    assert "config" in out


def test_rp_orders():
    res = subprocess.run([sys.executable, str(SCRIPTS / "rp_pi1.py"), "--n-max", "4"], capture_output=True, text=True)
    rows = json.loads(res.stdout)["rows"]
    assert [r["order"] for r in rows] == [None, 2, 2, 2]
