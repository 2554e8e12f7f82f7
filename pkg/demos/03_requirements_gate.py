"""Gate: turning audit findings into a CI-style pass/fail decision.

Writes a dataset and a requirements file, then drives the command-line
pipeline (compute -> detect --require) twice: once with bounds the dataset
meets (exit 0) and once with bounds it violates (exit 1). Parsing or I/O
problems exit 2, so a pipeline can distinguish "data got worse" from
"the job is misconfigured".
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import ecskit as ek

tmp = Path(tempfile.mkdtemp(prefix="ecs-gate-"))
csv = tmp / "cloud.csv"
run_dir = tmp / "run"
ek.save_csv(ek.reference_cloud(), csv)


def ecs(*args):
    proc = subprocess.run([sys.executable, "-m", "ecskit", *map(str, args)],
                          capture_output=True, text=True)
    return proc


print("computing the run artifact...")
proc = ecs("compute", "--csv", csv, "--inputs", "in_0,in_1", "--outputs", "out_0",
           "--delta-in", "rel:0.3", "--delta-out", "abs:0", "--k", "120",
           "--out", run_dir)
assert proc.returncode == 0, proc.stderr

# --- a gate this dataset satisfies ---------------------------------------------

passing = tmp / "requirements.txt"
passing.write_text(
    "# quality gate for the clustered study\n"
    "outliers K=100 t=71 max=12     # a handful of label disagreements is fine\n"
    "isolated m=50 max=0            # every input needs 50 close neighbors\n"
    "groups g=100 tol=5 min=500     # most points must sit in healthy groups\n"
)
proc = ecs("detect", "--run", run_dir, "--require", passing)
print(f"\npassing gate -> exit code {proc.returncode}")
print(proc.stderr.strip())

# --- a gate it violates ----------------------------------------------------------

failing = tmp / "strict.txt"
failing.write_text("outliers K=100 t=71 max=0\n")
proc = ecs("detect", "--run", run_dir, "--require", failing)
print(f"\nstrict gate -> exit code {proc.returncode}")
print(proc.stderr.strip())
verdict = json.loads(proc.stdout)["requirements"]
for check in verdict["checks"]:
    print(f"   {check['requirement']}: observed {check['observed']} -> "
          f"{'ok' if check['ok'] else 'violated'}")

# --- a misconfigured invocation ---------------------------------------------------

proc = ecs("detect", "--run", tmp / "no-such-run", "--isolated", "m=10")
print(f"\nmissing artifact -> exit code {proc.returncode} (error, not a failure)")
