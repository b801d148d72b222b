"""Smoke test for the Python bindings.

Build and install first:
    pip install --no-build-isolation -e crates/py
"""

import json
import math

import udw_harvest_py as uh


def main():
    det = uh.CircularDetector(0.1, 5.0, 0.02)
    assert abs(det.gamma - math.sqrt(1.1)) < 1e-15
    assert abs(det.omega - math.sqrt(5.0 / (0.02 * 1.1))) < 1e-12

    p = uh.transition_probability(det, 0.1)
    assert abs(p - 4.9664905395e-2) < 1e-7, p
    parts = uh.response_breakdown(det, 0.1)
    total = parts["bounded"] + parts["principal_value"] + parts["inertial"] + parts["pole"]
    assert abs(total - parts["total"]) < 1e-14

    pair = uh.PairConfig(det, det, sep=2.0, boundary_distance=0.1)
    c = uh.correlation(pair)
    assert isinstance(c["c"], complex)
    assert abs(c["c"].real - 3.3753072159e-3) < 1e-9, c

    h = uh.harvest(pair)
    assert h["slack"] >= -1e-9
    assert h["mutual_info"] > 0.0

    mi = uh.mutual_information(0.01, 0.01, 0.01j)
    assert abs(mi["mutual_info"] - 0.02 * math.log(2.0)) < 1e-14
    assert uh.mutual_information(0.02, 0.01, 0j)["mutual_info"] == 0.0

    config = json.dumps({
        "fixed": {"gap_a": 0.1, "accel": 1.0, "radius": 0.02, "boundary_distance": 0.1},
        "axis": {"param": "sep", "min": 0.5, "max": 2.0, "points": 3},
        "gap_ratios": [0, 2],
    })
    table = uh.run_sweep(config)
    assert table == uh.run_sweep(config, workers=2)
    assert len(table.strip().splitlines()) == 1 + 6

    grid = json.dumps({
        "gap": 0.1,
        "response": {"accels": [1.0], "radii": [0.02], "boundary_distances": [1.0]},
    })
    report = json.loads(uh.verify(grid))
    assert report["passed"], report

    try:
        uh.CircularDetector(0.1, -1.0, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative acceleration accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
