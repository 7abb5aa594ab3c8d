#!/usr/bin/env python3
"""Time the moment pipelines at representative configurations.

Reports wall time per call for the closed forms, the Gaussian engine
(second- and fourth-order photon readouts plus quadratures), the
truncated-Fock oracle, and one zero-order uncertainty evaluation, so
regressions in the hot paths show up as numbers rather than as slow
test suites.

Usage:
    python3 scripts/bench_moments.py [--repeat 50]
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from holonoise.config import HolometerConfig
from holonoise.estimation import EstimatorSpec, u0
from holonoise.fock_oracle import oracle_moments
from holonoise.holometer import quadrature_readout, readout_moments
from holonoise.observables import closed_form_moments

BRIGHT = HolometerConfig(mu=1e6, psi=math.pi / 2, lam=10.0, eta=0.95,
                         phi0_1=0.2, phi0_2=0.2, input_kind="TWB")
DIM = HolometerConfig(mu=1.5, psi=math.pi / 2, lam=0.4, eta=0.9,
                      phi0_1=0.8, phi0_2=0.8, input_kind="TWB")


def clock(label: str, fn, repeat: int) -> None:
    fn()  # warm up caches and allocations outside the timed loop
    start = time.perf_counter()
    for _ in range(repeat):
        fn()
    per_call = (time.perf_counter() - start) / repeat
    print(f"{label:<52s} {1e3 * per_call:9.3f} ms/call")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=50, help="timed calls per row")
    args = parser.parse_args()
    repeat = max(1, args.repeat)

    diff = EstimatorSpec(kind="TwbDifferenceSquared")

    clock("closed-form first/second moments (bright)",
          lambda: closed_form_moments(BRIGHT), repeat)
    clock("engine photon readout, order 2 (bright)",
          lambda: readout_moments(BRIGHT, max_order=2), repeat)
    clock("engine photon readout, order 4 (bright)",
          lambda: readout_moments(BRIGHT, max_order=4), repeat)
    clock("engine quadrature readout (bright)",
          lambda: quadrature_readout(BRIGHT), repeat)
    clock("zero-order uncertainty, difference readout (bright)",
          lambda: u0(BRIGHT, diff), max(1, repeat // 5))
    # the oracle walks a truncated number basis, so it only runs at low
    # occupancy; this is the guardrail-domain cost, not the bright one
    clock("fock oracle end-to-end, order 4 (dim)",
          lambda: oracle_moments(DIM), max(1, repeat // 10))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
