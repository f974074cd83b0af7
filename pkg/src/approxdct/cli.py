"""Command-line front end: verify, analyze, compress, sweep, bitwidth."""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import codec, fastdct, spectral, transforms
from .imageio import BadFormat, UnsupportedDepth, load_corpus, load_pgm, save_pgm
from .imageio import bundled_corpus_dir
from .transforms import ComparatorUnavailable

RANDOM_VECTORS = 10_000
SEED = 20121001


@dataclass
class Check:
    name: str
    status: str  # PASS, FAIL or SKIPPED
    detail: str = ""


def parse_r_range(text: str) -> list[int]:
    """``a:b:step`` inclusive of ``b``; a bare integer means just that r."""
    parts = text.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad r-range {text!r}") from None
    if len(nums) == 1:
        nums = [nums[0], nums[0], 1]
    elif len(nums) == 2:
        nums.append(1)
    if len(nums) != 3 or nums[2] <= 0:
        raise argparse.ArgumentTypeError(f"bad r-range {text!r}; use a:b:step")
    a, b, step = nums
    values = list(range(a, b + 1, step))
    if not values or values[0] < 1 or values[-1] > codec.NUM_COEFFS:
        raise argparse.ArgumentTypeError(f"r-range {text!r} must lie within [1, 256]")
    return values


def _r_value(text: str) -> int:
    r = int(text)
    if not 1 <= r <= codec.NUM_COEFFS:
        raise argparse.ArgumentTypeError("r must lie in [1, 256]")
    return r


def _optional_bas(path):
    try:
        return transforms.build_bas2010(path)
    except ComparatorUnavailable as exc:
        return exc


def run_checks(proposed=None, bas_path=None) -> list[Check]:
    proposed = proposed or transforms.build_proposed()
    kernel = proposed.kernel.astype(np.int64)
    checks = []

    ft = fastdct.default_factorization()
    basis = np.eye(transforms.N, dtype=np.int64)
    rng = np.random.default_rng(SEED)
    xs = rng.integers(-(1 << 15), 1 << 15, size=(transforms.N, RANDOM_VECTORS))
    basis_ok = np.array_equal(fastdct.fast_forward(basis, factorization=ft), kernel)
    random_ok = np.array_equal(
        fastdct.fast_forward(xs, factorization=ft), kernel @ xs)
    checks.append(Check(
        "factorization-equality",
        "PASS" if basis_ok and random_ok else "FAIL",
        f"basis={'ok' if basis_ok else 'mismatch'} "
        f"random[{RANDOM_VECTORS}]={'ok' if random_ok else 'mismatch'}",
    ))

    _, fast_ops = fastdct.fast_forward(xs[:, 0], return_counts=True, factorization=ft)
    _, direct_ops = fastdct.direct_forward(xs[:, 0], return_counts=True,
                                           kernel=proposed.kernel.tolist())
    counts_ok = (fast_ops.additions == 72 and direct_ops.additions == 208
                 and fast_ops.multiplications == 0 and fast_ops.shifts == 0)
    checks.append(Check(
        "adder-count", "PASS" if counts_ok else "FAIL",
        f"additions(fast)={fast_ops.additions} additions(direct)={direct_ops.additions} "
        f"mults={fast_ops.multiplications} shifts={fast_ops.shifts}",
    ))

    gram = kernel @ kernel.T
    expected = np.diag(np.tile([16, 14, 12, 14], 4))
    checks.append(Check(
        "gram-diagonal", "PASS" if np.array_equal(gram, expected) else "FAIL",
        f"diag={np.diag(gram).tolist()}",
    ))

    specs = [proposed, transforms.build_exact_dct(), transforms.build_wht()]
    bas = _optional_bas(bas_path)
    for spec in specs:
        err = spec.orthogonality_error()
        checks.append(Check(f"orthogonality[{spec.name}]",
                            "PASS" if err < transforms.ORTHO_TOL else "FAIL",
                            f"max|AA^T-I|={err:.3g}"))

    for spec in specs + ([bas] if isinstance(bas, transforms.TransformSpec) else []):
        worst = max(
            abs(spectral.error_energy(spec, m) - spectral.parseval_energy(spec, m))
            for m in range(transforms.N)
        )
        checks.append(Check(f"parseval[{spec.name}]",
                            "PASS" if worst < 1e-6 else "FAIL", f"max gap={worst:.3g}"))

    if isinstance(bas, transforms.TransformSpec):
        err = bas.orthogonality_error()
        checks.append(Check("orthogonality[bas2010]",
                            "PASS" if err < transforms.TRANSPOSE_INVERSE_TOL else "FAIL",
                            f"max|AA^T-I|={err:.3g}"))
    else:
        checks.append(Check("bas2010", "SKIPPED", str(bas)))
    return checks


def cmd_verify(args) -> int:
    checks = run_checks(bas_path=args.bas_matrix)
    for c in checks:
        print(f"{c.name}: {c.status} {c.detail}".rstrip())
    failed = [c.name for c in checks if c.status == "FAIL"]
    counts = next(c.detail for c in checks if c.name == "adder-count")
    print(f"{counts} {'FAIL ' + ','.join(failed) if failed else 'PASS'}")
    return 1 if failed else 0


def _fmt(v: float) -> str:
    return repr(float(v))


def cmd_analyze(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    columns = [transforms.build_proposed(), transforms.build_wht()]
    bas = _optional_bas(args.bas_matrix)
    if isinstance(bas, transforms.TransformSpec):
        columns.append(bas)
    else:
        print(f"bas2010 column omitted: {bas}", file=sys.stderr)
    dct = transforms.build_exact_dct()
    reports = [spectral.full_report(s, args.grid) for s in columns + [dct]]
    names = [s.name for s in columns] + ["dct_self_check"]

    table = out / "error_energy.csv"
    with open(table, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m"] + names)
        for m in range(transforms.N):
            w.writerow([m] + [_fmt(r.energies[m]) for r in reports])
        w.writerow(["total"] + [_fmt(r.total) for r in reports])

    for rep in reports[:-1]:
        path = out / f"curves_{rep.name}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            # m = 0 is left out: every transform matches the DCT there
            w.writerow(["omega"] + [f"D_{m}" for m in range(1, transforms.N)])
            for k, omega in enumerate(rep.grid):
                w.writerow([_fmt(omega)] + [_fmt(rep.curves[m, k])
                                            for m in range(1, transforms.N)])

    print("m".ljust(6) + "".join(n.rjust(16) for n in names))
    for m in range(transforms.N):
        print(str(m).ljust(6) + "".join(f"{r.energies[m]:16.2f}" for r in reports))
    print("total".ljust(6) + "".join(f"{r.total:16.2f}" for r in reports))
    print(f"wrote {table} and {len(reports) - 1} curve files to {out}")
    return 0


def cmd_compress(args) -> int:
    spec = transforms.get_transform(args.transform, args.bas_matrix)
    image = load_pgm(args.input)
    out = codec.compress_image(spec, image, codec.RetentionPolicy(args.r))
    save_pgm(out, args.out)
    if args.diff_out:
        save_pgm(codec.difference_image(image, out), args.diff_out)
    err = codec.mse(image, out)
    print(f"{codec.psnr_from_mse(err)!r} {err!r} {codec.uqi(image, out)!r}")
    return 0


def cmd_sweep(args) -> int:
    corpus_dir = Path(args.corpus) if args.corpus else bundled_corpus_dir()
    corpus = load_corpus(corpus_dir) if corpus_dir.is_dir() else []
    if not corpus:
        print(f"error: no .pgm images in {corpus_dir}", file=sys.stderr)
        return 1
    names = args.transform or ["dct", "proposed", "wht", "bas2010"]
    specs = []
    for name in names:
        try:
            specs.append(transforms.get_transform(name, args.bas_matrix))
        except ComparatorUnavailable as exc:
            if args.transform:
                raise
            print(f"bas2010 omitted: {exc}", file=sys.stderr)
    report = codec.sweep(specs, corpus, args.r_range, jobs=args.jobs,
                         with_uqi=not args.no_uqi)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    codec.write_report_csv(report, out / "sweep_images.csv", out / "sweep_average.csv")
    print(f"{len(report.records)} records for {len(corpus)} images written to {out}")
    return 0


def cmd_bitwidth(args) -> int:
    rep = fastdct.analyze_bit_growth(args.bitwidth, signed=args.signed)
    lo, hi = rep.input_range
    print(f"input W={rep.input_width} range [{lo}, {hi}]")
    print(f"{'signal':<22}{'min':>10}{'max':>10}{'bits':>6}")
    for s in rep.stages:
        print(f"{s.label:<22}{s.min_value:>10}{s.max_value:>10}{s.bits:>6}")
    for s in (rep.output_1d, rep.output_2d):
        print(f"{s.label}: {s.bits} signed bits (max |y| = {s.max_magnitude})")
    print("witness-1d: " + " ".join(map(str, rep.output_1d.witness)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="approxdct", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def bas_flag(sp):
        sp.add_argument("--bas-matrix", default=None,
                        help=f"BAS-2010 matrix file (fallback: ${transforms.BAS_MATRIX_ENV})")

    sp = sub.add_parser("verify", help="factorization, orthogonality and count checks")
    bas_flag(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("analyze", help="error-energy table and D_m curve data")
    sp.add_argument("--grid", type=int, default=spectral.DEFAULT_GRID)
    sp.add_argument("--out", default="analysis")
    bas_flag(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("compress", help="compress one PGM image")
    sp.add_argument("input")
    sp.add_argument("--transform", choices=transforms.TRANSFORM_NAMES, default="proposed")
    sp.add_argument("--r", type=_r_value, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--diff-out", default=None)
    bas_flag(sp)
    sp.set_defaults(func=cmd_compress)

    sp = sub.add_parser("sweep", help="quality metrics over a corpus and r range")
    sp.add_argument("--corpus", default=None, help="directory of .pgm files")
    sp.add_argument("--r-range", type=parse_r_range,
                    default=list(codec.DEFAULT_R_VALUES), help="a:b:step (default 2:256:2)")
    sp.add_argument("--transform", action="append", choices=transforms.TRANSFORM_NAMES)
    sp.add_argument("--out", default="sweep")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--no-uqi", action="store_true")
    bas_flag(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("bitwidth", help="worst-case bit growth of the fast algorithm")
    sp.add_argument("--bitwidth", type=int, default=8)
    sp.add_argument("--signed", action="store_true")
    sp.set_defaults(func=cmd_bitwidth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BadFormat, UnsupportedDepth, codec.BadGeometry, ComparatorUnavailable,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
