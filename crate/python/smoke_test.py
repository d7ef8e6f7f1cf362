"""Builds the extension module and exercises it end to end.

Run from the repository root: python3 python/smoke_test.py
"""

import importlib.util
import pathlib
import shutil
import subprocess
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build_and_load():
    subprocess.run(
        ["cargo", "build", "-p", "covalg-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    suffix = {"darwin": ".dylib", "win32": ".dll"}.get(sys.platform, ".so")
    built = ROOT / "target" / "debug" / f"libcovalg_py{suffix}"
    if sys.platform == "win32":
        built = ROOT / "target" / "debug" / "covalg_py.dll"
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / ("covalg" + sysconfig.get_config_var("EXT_SUFFIX"))
    shutil.copy(built, target)
    spec = importlib.util.spec_from_file_location("covalg", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def all_passed(checks):
    failed = [c["name"] for c in checks if not c["passed"]]
    assert not failed, failed
    return len(checks)


def main():
    covalg = build_and_load()
    print("covalg", covalg.__version__)

    names = covalg.gallery()
    assert "shift-c3" in names and "m2-weights" in names

    shift = covalg.System.shift(3)
    assert shift.chain_bound == 3
    r = shift.realize()
    assert r.blocks == [3], r
    assert r.dim == 9
    assert r.faithfulness() > 1e-8
    print(r)

    all_passed(shift.validate(seed=1, samples=20))
    all_passed(shift.build(seed=1, samples=20))
    all_passed(shift.pv())
    all_passed(covalg.System.shift(2).toeplitz(samples=20))
    all_passed(r.dual_structure())

    checks = covalg.structure([2], [[0, 1]])
    all_passed(checks)
    checks = covalg.structure([2], [[0, 2]])
    semi = next(c for c in checks if c["name"] == "structure.semisaturated")
    assert not semi["passed"] and semi["certificate"] == "not semi-saturated at n = 2"

    swap = covalg.System.from_gallery("swap-c2")
    assert swap.chain_bound is None
    try:
        swap.pv()
    except ValueError as e:
        print("pv on swap refused:", e)
    else:
        raise AssertionError("pv on an unbounded chain should fail")

    try:
        covalg.System.from_json('{"format": 1, "block_sizes": [1], "extra": 0}')
    except ValueError as e:
        assert "extra" in str(e)
    else:
        raise AssertionError("unknown fields should be rejected")

    assert covalg.smith_divisors([[2, 0], [0, 3]]) == ["1", "6"]
    print("smoke test passed")


if __name__ == "__main__":
    main()
