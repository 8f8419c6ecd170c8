"""
The four difficulty formulations
================================

A tour of the index-of-difficulty variants on a single pointing trial:
the classical Shannon form, the spatial adjustment through effective
width, and the temporal adjustment that scales the width term by the
binary log of temporal efficiency.
"""

import numpy as np

from antasid import id_na, id_sa, id_ta, id_tsa, temporal_factor

# One trial: the cursor travelled 96 px to a 32 px target.
amplitude, width = 96.0, 32.0

print("classical:", id_na(amplitude, width), "bits")

# Spatial adjustment replaces the nominal width with the effective one.
# A sloppy endpoint distribution (wide scatter) inflates W_e and lowers
# the index; a tight one shrinks W_e and raises it.
for w_e in (16.0, 32.0, 64.0):
    print(f"  spatially adjusted with W_e={w_e:5.1f}: {id_sa(amplitude, w_e):.4f} bits")

# The temporal factor is 1 at MT = 0.5 s (equal emphasis on speed and
# accuracy), 0 at the 1 s ideal, and negative for slower trials.
for mt in (0.25, 0.5, 1.0, 2.0, 4.0):
    t = temporal_factor(mt)
    print(f"MT={mt:5.2f}s  t={t:+.3f}  ID_TA={id_ta(amplitude, width, t):8.4f} bits")

# At exactly t = 1 the adjusted formulations collapse onto the
# classical ones, bit for bit.
t_eq = temporal_factor(0.5)
assert id_ta(amplitude, width, t_eq) == id_na(amplitude, width)
assert id_tsa(amplitude, width, t_eq) == id_sa(amplitude, width)
print("\nat MT = 0.5 s the adjusted indices equal the classical ones exactly")

# The full characteristic: difficulty as a function of observed
# movement time, for each nominal width.
print("\nID_TA across movement times (rows) and widths (columns):")
mts = np.array([0.3, 0.5, 0.8, 1.2, 2.0])
widths = np.array([32.0, 64.0, 96.0, 128.0])
header = "MT\\W " + "".join(f"{w:9.0f}" for w in widths)
print(header)
for mt in mts:
    t = temporal_factor(float(mt))
    row = "".join(f"{id_ta(300.0, float(w), t):9.4f}" for w in widths)
    print(f"{mt:4.1f} {row}")
