import runpy
from pathlib import Path

BENCH = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_eigensolver.py"


def test_benchmark_script_runs(capsys):
    module = runpy.run_path(str(BENCH))
    module["main"](["--sizes", "3", "6", "--repeat", "1"])
    lines = capsys.readouterr().out.splitlines()
    header = [line for line in lines if line.lstrip().startswith("N_h")]
    assert header
    assert lines[-1].split()[0] == "12"
