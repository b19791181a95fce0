"""Smoke test for the growthlab_py extension module."""

import json
import math
import pathlib
import sys
import tempfile

import growthlab_py as gl

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def spec(name):
    return str(FIXTURES / f"{name}.group")


def main():
    census = gl.ball_census(spec("free2"), 6)
    assert census == [2 * 3**r - 1 for r in range(7)], census

    report = json.loads(gl.entropy(spec("free2"), 8))
    assert report["classification"] == "exponential-consistent", report

    screen = json.loads(gl.screen(spec("sol_fib")))
    osin = float(screen["entries"][0]["osin_bound"])
    assert math.isclose(osin, 0.1212, abs_tol=5e-4), osin

    assert gl.closure_order(spec("heis_mod3"), 1000) == 27
    assert gl.closure_order(spec("heisenberg"), 1000) is None

    with tempfile.TemporaryDirectory() as d:
        code = gl.run_cli(["ball", spec("heisenberg"), "--radius", "6", "-o", d])
        assert code == 0
        assert (pathlib.Path(d) / "census.csv").exists()
    assert gl.run_cli(["ball", "--radius", "-1", "x"]) == 2

    print("smoke test ok")


if __name__ == "__main__":
    sys.exit(main())
