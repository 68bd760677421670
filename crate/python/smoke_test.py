"""Smoke test for the pyfrontidx extension.

Uses an installed `pyfrontidx` if there is one, otherwise loads the library built by
`cargo build --release -p frontidx-py --features extension-module`.
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys


def load():
    try:
        import pyfrontidx
        return pyfrontidx
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parents[1]
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libpyfrontidx.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("pyfrontidx", str(lib))
            spec = importlib.util.spec_from_file_location("pyfrontidx", lib, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("pyfrontidx not found: build it with "
             "`cargo build --release -p frontidx-py --features extension-module`")


def main():
    fx = load()

    sphere = fx.Surface.sphere()
    r = fx.verify("front", sphere, grid=32)
    assert (r["lhs"], r["rhs"], r["residual"]) == (2, 2, 0), r
    assert abs(r["degree"]["raw"] - 1.0) < 1e-6

    tail = fx.Surface.swallowtail()
    c = fx.classify_point(tail, 0.0, 0.0)
    assert c["verdict"] == {"kind": "a3", "sign": "plus"}, c
    lam = fx.cascade(tail, 0.0, 0.0, k=2)
    assert abs(lam[2] - 24.0) < 1e-8, lam
    fold = fx.classify_point(tail, 0.1, -0.06)
    assert fold["verdict"]["kind"] == "a2"
    assert abs(fold["lambda_dot"] - 24 * 0.1 * math.sqrt(1.0101)) < 1e-6

    q = fx.verify_morin_map("torus_fold", grid=48)
    assert q["residual"] == 0 and q["a3_plus"] + q["a3_minus"] == 0

    z = fx.poincare_hopf("sphere_height")
    assert z["sum"] == 2 and len(z["zeros"]) == 2

    b = fx.verify("blaschke", fx.Surface.rotational_gamma(17 / 80), grid=128)
    assert b["residual"] == 0 and b["chi_minus"] == 0 and b["a3_plus"] + b["a3_minus"] == 0

    try:
        fx.parse_config("scenario=blaschke\nepsilon=0.3\n")
    except fx.FrontidxError as e:
        assert "epsilon" in str(e)
    else:
        raise AssertionError("epsilon=0.3 accepted")

    report = fx.run_config("scenario=front_formula\nfamily=torus\ngrid=64\n")
    assert report["schema"] == 1 and report["passed"], report["errors"]

    print("pyfrontidx smoke test passed")


if __name__ == "__main__":
    main()
