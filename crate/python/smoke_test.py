"""Smoke test for the `esf` extension module.

Build and run from the repository root:

    cargo build -p esf-python --release
    cp target/release/libesf.so python/esf.so
    python3 python/smoke_test.py
"""

import math
import os
import sys
import tempfile
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import esf  # noqa: E402


def main():
    assert esf.exact_s(4, 4, 2) == 1
    assert esf.exact_s(3, 1, 2) == Fraction(1, 6)
    assert esf.exact_t(3, 2) == 1
    assert esf.k_cap(13542) == 28

    cert = esf.find_certificate(13543, 1)
    assert cert is not None and cert.p == 6763, cert
    assert esf.find_certificate(20, 1) is None
    certs, gaps = esf.certify_range(13543, 13560)
    assert certs and not gaps

    lo, hi = esf.theta("10")
    assert lo <= math.log(210) <= hi and hi - lo < 1e-12

    m = esf.case1_margin(50217)
    assert m["holds"] and m["margin"][0] > 0

    with tempfile.TemporaryDirectory() as d:
        report = esf.scan(2, 40, os.path.join(d, "hits.csv"))
    hits = [(h["n"], h["i"], h["k"]) for h in report["integer_hits"]]
    assert hits == [(2, 2, 1), (4, 4, 2)], hits

    try:
        esf.exact_s(5, 6, 2)
    except ValueError:
        pass
    else:
        raise AssertionError("i > n accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
