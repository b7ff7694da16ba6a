"""Regenerate the golden preset CSVs for the active backend.

    python tools/make_golden.py            # writes tests/golden/<backend>/
    CAVSIM_BACKEND=numpy python tools/make_golden.py

Also prints, per preset, the max population deviation from a dt/10 reference
run sampled at the same times.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from cavsim import BACKEND, scenario

ROOT = Path(__file__).resolve().parents[1]


def refinement_error(cfg: scenario.ScenarioConfig, factor: int = 10) -> float:
    coarse = scenario.run_scenario(cfg, write=False).trajectory
    fine_cfg = cfg.replace(dt=cfg.dt / factor, iterations=cfg.iterations * factor,
                           record_stride=cfg.record_stride * factor)
    fine = scenario.run_scenario(fine_cfg, write=False).trajectory
    return float(np.max(np.abs(coarse.probabilities - fine.probabilities)))


def main(argv: list[str]) -> int:
    out = ROOT / "tests" / "golden" / BACKEND
    out.mkdir(parents=True, exist_ok=True)
    check = "--no-check" not in argv
    for name in scenario.preset_names():
        cfg = scenario.load_preset(name)
        res = scenario.run_scenario(cfg, out, plot=False)
        line = f"{name}: wrote {res.csv_path.relative_to(ROOT)}"
        if check:
            line += f"  dt/10 deviation {refinement_error(cfg):.3e}"
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
