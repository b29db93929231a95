"""Predicted vs fitted small-b exponents of the local r^tw for m_γ = 1..4, l_f = 1..3.

    python scripts/scaling_table.py [--n-f 4] [--theta-k 0.2]
"""
import argparse

from twistbeam.beam import BeamParams
from twistbeam.observables import (
    TargetGeometry,
    classify_center,
    fit_scaling,
    predict_scaling,
    ratio_rtw,
    small_b_grid,
)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-f", type=int, default=4)
    ap.add_argument("--theta-k", type=float, default=0.2)
    ap.add_argument("--points", type=int, default=9)
    args = ap.parse_args(argv)
    print(f"{'l_f':>3} {'m_g':>3} {'center':>13} {'predicted':>9} {'measured':>10} {'stderr':>9}")
    for l_f in (1, 2, 3):
        for m_g in (1, 2, 3, 4):
            beam = BeamParams.resonant(args.n_f, args.theta_k, m_g)
            bs = small_b_grid(beam, args.points)
            vals = [ratio_rtw(args.n_f, l_f, beam, TargetGeometry(b)) for b in bs]
            fit = fit_scaling(bs, vals, beam.kappa)
            pred = predict_scaling(args.n_f, l_f, 0, beam).ratio_exponent
            print(f"{l_f:>3} {m_g:>3} {classify_center(l_f, beam):>13} {pred:>9d} "
                  f"{fit.slope:>10.5f} {fit.stderr:>9.2e}")


if __name__ == "__main__":
    main()
