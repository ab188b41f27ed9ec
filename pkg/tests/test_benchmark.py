import json
import os
import subprocess
import sys

BENCH = os.path.join(os.path.dirname(__file__), os.pardir, "benchmarks", "bench_kernels.py")


def test_benchmark_runs_and_backends_agree():
    out = subprocess.run([sys.executable, BENCH, "--repeat", "1", "--no-end-to-end", "--json"],
                         capture_output=True, text=True, check=True)
    data = json.loads(out.stdout)
    assert {k["case"] for k in data["kernels"]} == {"mul_small", "mul_large", "dot_8x30", "add_large"}
    if data["compiled_available"]:
        assert all(k["compiled_s"] > 0 for k in data["kernels"])
