#!/usr/bin/env python3
"""Walk the bundled eight-revision taxonomy iteration and print, for each
adjacent pair, which end conditions hold and why iteration keeps going.
"""

import sys

from tracelift.evolution import coverage_report, evaluate_end_conditions
from tracelift.sampledata import build_taxonomy_iterations


def main() -> int:
    revisions = build_taxonomy_iterations()
    print(f"{'pair':>8}  {'no-change':>9}  {'no-merge/split':>14}  {'coverage':>8}  notes")
    for prev, curr in zip(revisions, revisions[1:]):
        report = evaluate_end_conditions(prev, curr)
        ops = ", ".join(f"{op.kind.value}:{op.subject}" for op in curr.changelog) or "—"
        uncovered = ", ".join(report.uncovered_characteristics) or "—"
        note = f"ops [{ops}]"
        if report.uncovered_characteristics:
            note += f"; uncovered [{uncovered}]"
        if report.met:
            note += "; STOP"
        print(
            f"({prev.index},{curr.index})".rjust(8)
            + f"  {str(report.cond1_no_changes):>9}"
            + f"  {str(report.cond2_no_merge_split):>14}"
            + f"  {str(report.cond3_full_coverage):>8}"
            + f"  {note}"
        )
    final = revisions[-1]
    counts = coverage_report(final)
    print(f"\nfinal taxonomy: {len(counts)} characteristics, "
          f"{sum(counts.values())} placements over {len(final.object_classifications)} objects")
    return 0


if __name__ == "__main__":
    sys.exit(main())
