"""Compare the eta-corrected closed form against the physical conversion models.

At eta = 1 all three agree; below 1 they do not, and this prints by how much.

    python3 scripts/model_gap_report.py --scenario s1 --Fp 0.5 --Ff 1.0
"""

import argparse

import numpy as np

from hyperdistill.analytic import ScenarioParams, fidelity_eta_corrected
from hyperdistill.oracle import ConversionKind, ConversionModel
from hyperdistill.protocol import run_probability
from hyperdistill.sweep import build_point, fmt, point_state


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", default="s1", choices=["s1", "s2", "s3"])
    ap.add_argument("--Fp", type=float, default=0.5)
    ap.add_argument("--Ff", type=float, default=1.0)
    ap.add_argument("--A", type=float, default=0.1)
    ap.add_argument("--points", type=int, default=11)
    args = ap.parse_args()

    values = {"Fp": args.Fp, "Ff": args.Ff}
    if args.scenario == "s3":
        values["A"] = args.A
    pt = build_point(args.scenario, values)
    h = point_state(pt)
    print("eta,closed_form,per_pair_F,per_pair_Y,per_photon_F,per_photon_Y,max_gap")
    for eta in np.linspace(0.0, 1.0, args.points):
        cf = fidelity_eta_corrected(ScenarioParams(args.scenario, pt.F_p, pt.F_aux, pt.A, pt.B, pt.C, eta))
        pair = run_probability(h, m=ConversionModel(ConversionKind.PER_PAIR, eta))
        photon = run_probability(h, m=ConversionModel(ConversionKind.PER_PHOTON, eta))
        gaps = [abs(cf - x) for x in (pair.F_p_prime, photon.F_p_prime) if cf is not None and x is not None]
        print(",".join(fmt(x) for x in (eta, cf, pair.F_p_prime, pair.Y, photon.F_p_prime, photon.Y,
                                         max(gaps) if gaps else None)))


if __name__ == "__main__":
    main()
