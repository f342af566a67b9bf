"""Regenerate the stored cohomology tables (slow; run once).

The 2-primary window reaches internal degree 32 where cobar slices have tens
of thousands of words; orders there come from the 2-adic divisor profile of
the incoming differential plus a modular rank certificate.  Results land in
src/sseqlab/decks/ as JSON consumed by compare-connective and the tests.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sseqlab.e2table import (THREE_LOCAL_ALIASES, TWO_PRIMARY_ALIASES, compute_table)
from sseqlab.hopf import cubic_three_local, cubic_two_primary

OUT = Path(__file__).resolve().parent.parent / "src" / "sseqlab" / "decks"


def progress(n, s, g):
    print(f"  ({n},{s}): {g}", flush=True)


def main():
    t0 = time.time()
    print("p=3 table, 0 <= n <= 48, s <= 8", flush=True)
    t3 = compute_table(cubic_three_local(), 0, 48, 8, region_only=False,
                       alias_rules=THREE_LOCAL_ALIASES, progress=progress)
    (OUT / "e2_p3.json").write_text(t3.to_json())
    print("p=3 done", round(time.time() - t0, 1), flush=True)

    print("p=2 table, 0 <= n <= 26, s <= 6 (region only beyond t=24)", flush=True)
    t2 = compute_table(cubic_two_primary(), 0, 26, 6, region_only=False,
                       alias_rules=TWO_PRIMARY_ALIASES, progress=progress,
                       full_homology_t_max=24)
    (OUT / "e2_p2.json").write_text(t2.to_json())
    print("p=2 done", round(time.time() - t0, 1), flush=True)


if __name__ == "__main__":
    main()
