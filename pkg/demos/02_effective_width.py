"""
Effective target width, two ways
================================

The effective width W_e re-expresses a target by the accuracy users
actually achieved.  With recorded endpoints it is 4.133 times the
standard deviation of the signed endpoint error along the task axis;
without endpoints it can be approximated from an assumed error rate.
"""

import numpy as np

from antasid import (
    discrete_width_scale,
    effective_width_discrete,
    effective_width_sd,
    error_rate_for_unit_ratio,
    z_from_error_rate,
)

rng = np.random.default_rng(7)

# --- endpoint-scatter method ---------------------------------------
# Simulated clicks around a target center, projected on the task axis.
for scatter_sd in (2.0, 5.0, 12.0):
    offsets = rng.normal(0.0, scatter_sd, 500)
    w_e = effective_width_sd(offsets)
    print(f"endpoint SD {scatter_sd:5.1f} px -> W_e = {w_e:7.2f} px (~4.133 * SD)")

# --- discrete-error method -----------------------------------------
# Each nominal width is scaled by 2.066 / z(error rate).  Low error
# rates mean users were conservative (W_e < W); high ones the reverse.
print()
for eps in (0.01, 0.03883, 0.10, 0.25):
    z = z_from_error_rate(eps)
    scale = discrete_width_scale(eps)
    print(f"error rate {eps:7.5f}  z = {z:6.4f}  W_e/W = {scale:7.4f}")

# The pivot: the error rate at which the scaled width equals the
# nominal width. Widths pass through unchanged there.
pivot = error_rate_for_unit_ratio()
widths = [32.0, 64.0, 96.0, 128.0]
print(f"\nunit-ratio error rate: {pivot:.5f} ({pivot * 100:.3f}%)")
print(f"mean W   = {np.mean(widths):.4f} px")
print(f"mean W_e = {effective_width_discrete(widths, pivot):.4f} px at the pivot rate")
