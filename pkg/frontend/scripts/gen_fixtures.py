#!/usr/bin/env python3
"""Generate test fixture scenes through the engine CLI.

The dashboard consumes only the engine's external interfaces, so fixtures
come from `cerebro gen` + `cerebro layout` / `cerebro flow`. Everything is
deterministic; rerunning reproduces identical files.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
SEEDS = range(25)


def run(*args):
    subprocess.run(["cerebro", *map(str, args)], check=True)


def main():
    force = "--force" in sys.argv
    FIXTURES.mkdir(parents=True, exist_ok=True)
    done = FIXTURES / ".complete"
    if done.exists() and not force:
        print(f"fixtures already present in {FIXTURES}")
        return
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        for seed in SEEDS:
            swc = tmp / f"scan_{seed:02d}.swc"
            run("gen", "--seed", seed, "--out", swc)
            run("layout", swc, "--out", FIXTURES / f"scene_{seed:02d}.json")
        # one scene with flow values and a blockage for the flow-mode tests
        swc = tmp / "flow.swc"
        run("gen", "--seed", 0, "--out", swc)
        run("flow", swc, "--block", "MCA_R", "--out", FIXTURES / "scene_flow.json")
    done.write_text("ok\n")
    print(f"wrote {len(list(SEEDS)) + 1} scenes to {FIXTURES}")


if __name__ == "__main__":
    main()
