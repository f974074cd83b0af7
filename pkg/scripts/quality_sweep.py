"""Run the corpus quality sweep and summarise PSNR gaps at a few r values."""

import argparse

from approxdct import codec, transforms
from approxdct.imageio import load_bundled_corpus, load_corpus


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--corpus", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--show", type=int, nargs="*", default=[2, 10, 20, 38, 64, 128, 200])
    args = p.parse_args()

    corpus = load_corpus(args.corpus) if args.corpus else load_bundled_corpus()
    specs = [transforms.get_transform(n) for n in ("proposed", "dct", "wht")]
    report = codec.sweep(specs, corpus, codec.DEFAULT_R_VALUES, jobs=args.jobs, with_uqi=False)
    print(f"{len(corpus)} images: {', '.join(name for name, _ in corpus)}")
    print(f"{'r':>4} {'dct':>8} {'proposed':>9} {'wht':>8} {'dct-prop':>9} {'prop-wht':>9}")
    for r in args.show:
        d, a, w = (report.average(n, r).avg_psnr_db for n in ("dct", "proposed", "wht"))
        print(f"{r:>4} {d:8.2f} {a:9.2f} {w:8.2f} {d - a:9.2f} {a - w:9.2f}")


if __name__ == "__main__":
    main()
