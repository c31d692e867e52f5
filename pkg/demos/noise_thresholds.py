#!/usr/bin/env python3
"""Where loss and dark counts make a click experiment classically simulable.

Sweeps the network transmissivity for a Kerr-class input (ordering threshold
t_bar = -1) and prints the dark-count rate each eta_L demands, the effect of
a thermal environment, and one multimode squeezed-input working point.

Run:  python demos/noise_thresholds.py
"""

import math

from kerrpqd.simulability import (
    NoiseParams,
    gbs_qi_verdict,
    thermal_threshold_verdict,
    uniform_threshold_verdict,
)


def main():
    print("Kerr-class input (t_bar = -1), detector eta_D = 0.6")
    print(f"  {'eta_L':>6}  {'p_D needed':>10}  {'verdict at p_D = 0.25':>22}")
    for eta_l in (0.2, 0.4, 0.6, 0.8, 0.95):
        # uniform bound: simulable once p_D / eta_D >= eta_L
        p_needed = 0.6 * eta_l
        verdict = uniform_threshold_verdict(NoiseParams(eta_l, 0.6, 0.25), -1.0)
        tag = "simulable" if verdict.simulable else "quantum side"
        print(f"  {eta_l:6.2f}  {p_needed:10.3f}  {tag:>22}  (margin {verdict.margin:+.3f})")

    print("\nheating the environment moves the boundary (eta_L = 0.8, p_D = 0.1, eta_D = 0.6):")
    for nbar in (0.0, 1.0, 2.0, 4.5, 6.0):
        verdict = thermal_threshold_verdict(NoiseParams(0.8, 0.6, 0.1, nbar))
        flag = " [always simulable]" if verdict.always_simulable else ""
        tag = "simulable" if verdict.simulable else "quantum side"
        print(f"  nbar = {nbar:3.1f}   margin {verdict.margin:+.3f}   {tag}{flag}")
    ratio = 0.8 / 0.2
    print(f"  (always-simulable once nbar >= eta_L/(1-eta_L) = {ratio:.1f})")

    print("\nsqueezed-input quantum-advantage bound, 100 modes, eps = 0.1:")
    for eta_l, q_d in ((0.9, 0.01), (0.9, 0.2), (0.5, 0.01)):
        noise = NoiseParams(eta_L=eta_l, eta_D=1.0, p_D=q_d)
        verdict = gbs_qi_verdict(noise, r=1.0, num_modes=100, eps=0.1)
        tag = "simulable" if verdict.simulable else "not simulable"
        print(f"  eta_L = {eta_l:.2f}, q_D = {q_d:.2f}:  margin {verdict.margin:+.4f}  -> {tag}")
    print(f"  (r = 1 squeezing; the lossless ramp is ln[1/e^-2] = {2.0:.0f} nats)")


if __name__ == "__main__":
    main()
