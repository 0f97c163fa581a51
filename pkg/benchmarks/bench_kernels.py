"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--json PATH]

Part one times each kernel in-process under both backends.  Part two runs
the esoph free-score search end to end in a subprocess per backend, since
the backend is chosen once at import.
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from ordscore import _kernels_py

try:
    from ordscore import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def cases(k):
    rng = np.random.default_rng(0)
    p = rng.uniform(1e-9, 1 - 1e-9, 100_000)
    z = rng.normal(size=100_000)
    ab = rng.uniform(0.5, 30, (2000, 2))
    xs = rng.uniform(0, 1, 2000)
    ts = rng.normal(0, 3, 2000)
    eta = rng.normal(size=50_000)
    m = rng.integers(1, 50, 50_000).astype(float)
    y = np.floor(rng.uniform(0, 1, 50_000) * (m + 1))
    mu = 1 / (1 + np.exp(-eta))
    return {
        "norm_quantile_array (1e5)": lambda: k.norm_quantile_array(p),
        "norm_cdf_array (1e5)": lambda: k.norm_cdf_array(z),
        "transform_array su (1e5)": lambda: k.transform_array(z, 0, 0.3, 0.7),
        "transform_array gh (1e5)": lambda: k.transform_array(z, 1, 0.2, 0.4),
        "inc_beta_reg scalar (2000 calls)": lambda: [k.inc_beta_reg(a, b, x) for (a, b), x in zip(ab, xs)],
        "t_cdf scalar (2000 calls)": lambda: [k.t_cdf(t, 7.5) for t in ts],
        "binomial_working (5e4)": lambda: k.binomial_working(eta, y, m),
        "binomial_deviance (5e4)": lambda: k.binomial_deviance(y, m, mu),
    }


END_TO_END = """
import time
from ordscore import BACKEND, datasets as ds
from ordscore.scorefit import optimize_scores
frame = ds.load_esoph()
t0 = time.perf_counter()
for fam in ("su", "gh", "sas"):
    optimize_scores(frame.with_terms(ds.esoph_score_terms(fam)))
print(BACKEND, time.perf_counter() - t0)
"""


def end_to_end(pure: bool):
    env = dict(os.environ)
    if pure:
        env["ORDSCORE_PURE_PYTHON"] = "1"
    else:
        env.pop("ORDSCORE_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, check=True,
                         capture_output=True, text=True).stdout.split()
    return out[0], float(out[1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="write the timings here")
    args = ap.parse_args(argv)

    backends = {"python": _kernels_py}
    if _kernels_c is not None:
        backends["cython"] = _kernels_c
    else:
        print("compiled kernels not built; timing the Python fallback only\n")

    results = {}
    names = list(cases(_kernels_py))
    print(f"{'kernel':36s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name in names:
        row = {}
        for b, k in backends.items():
            fn = cases(k)[name]
            row[b] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        results[name] = row
        line = f"{name:36s}" + "".join(f"{row[b] * 1e3:10.2f}ms" for b in backends)
        if len(backends) > 1:
            line += f"{row['python'] / row['cython']:11.1f}x"
        print(line)

    print("\nesoph free search, three families, end to end")
    e2e = {}
    for pure in (True, False) if _kernels_c is not None else (True,):
        backend, seconds = end_to_end(pure)
        e2e[backend] = seconds
        print(f"  {backend:8s} {seconds:.3f}s")
    results["esoph end to end"] = e2e

    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2)


if __name__ == "__main__":
    main()
