#!/usr/bin/env python3
"""Writes the Wisconsin Diagnostic Breast Cancer table in its original
id,diagnosis,30-features CSV layout, using the copy bundled with
scikit-learn. Run this once to produce data/wdbc.data for the real-data
experiments; any canonical wdbc.data works equally well."""

import sys
from pathlib import Path


def main() -> int:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data/wdbc.data")
    try:
        from sklearn.datasets import load_breast_cancer
    except ImportError:
        print("scikit-learn is not available; supply wdbc.data manually", file=sys.stderr)
        return 1
    bundle = load_breast_cancer()
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        for i, (row, target) in enumerate(zip(bundle.data, bundle.target)):
            # sklearn encodes malignant as 0.
            diagnosis = "M" if target == 0 else "B"
            values = ",".join(repr(float(v)) for v in row)
            fh.write(f"{870000 + i},{diagnosis},{values}\n")
    print(f"wrote {out} ({len(bundle.data)} rows)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
