"""Print per-row error energies for every available transform.

Includes both Walsh-Hadamard row orderings so the ordering choice can be
compared side by side.
"""

import argparse

from approxdct import spectral, transforms


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--bas-matrix", default=None)
    p.add_argument("--digits", type=int, default=4)
    args = p.parse_args()

    specs = [transforms.build_proposed(), transforms.build_wht("natural"),
             transforms.build_wht("sequency")]
    labels = ["proposed", "wht-natural", "wht-sequency"]
    try:
        specs.append(transforms.build_bas2010(args.bas_matrix))
        labels.append("bas2010")
    except transforms.ComparatorUnavailable as exc:
        print(f"# bas2010 skipped: {exc}")

    reports = [spectral.full_report(s, grid_size=2) for s in specs]
    width = max(len(l) for l in labels) + 2
    print("m".ljust(6) + "".join(l.rjust(width) for l in labels))
    for m in range(16):
        cells = "".join(f"{r.energies[m]:.{args.digits}f}".rjust(width) for r in reports)
        print(str(m).ljust(6) + cells)
    print("total".ljust(6) + "".join(f"{r.total:.{args.digits}f}".rjust(width) for r in reports))


if __name__ == "__main__":
    main()
