"""Write the analytic gain/yield surfaces for every preset to CSV.

    python3 scripts/reproduce_figures.py --out-dir results --steps 51
"""

import argparse
from pathlib import Path

from hyperdistill.sweep import parse_config, read_rows, run_sweep

PRESETS = ("fig2a", "fig2b", "fig3a", "fig3b", "figA1")


def summarize(name, text):
    rows = [r for r in read_rows(text) if r["G"] is not None]
    best = max(rows, key=lambda r: r["G"])
    share = sum(r["G"] > 0 for r in rows) / len(rows)
    return (f"{name:6s} points={len(rows):5d} positive-gain share={share:.3f} "
            f"max G={best['G']:.4f} at F_p={best['F_p']:.2f}, aux={best['F_f_or_F_a']:.2f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--steps", type=int, default=51)
    ap.add_argument("--sources", default="analytic")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in PRESETS:
        specs = parse_config(f"[sweep]\npreset = {name}\nsteps = {args.steps}\nsources = {args.sources}\n")
        text = run_sweep(specs, out=out / f"{name}.csv")
        print(summarize(name, text))


if __name__ == "__main__":
    main()
