"""GHZ and four-qubit cluster states from a single photon.

Split the photon, then run identical doubling trees on both arms. Qubit j
is the rail pair (leaf j of arm A, leaf j of arm B): either every qubit
reads 0 or every qubit reads 1.
"""

# %%
import math

from pdu_forge.analysis import extract_logical, fidelity, target_cluster4, target_ghz
from pdu_forge.circuit import (
    CALIBRATED_CLUSTER4_PHASES,
    PUBLISHED_CLUSTER4_PHASES,
    build_cluster4,
    build_ghz,
    calibrate_cluster4,
    simulate,
)

for stages in (1, 2, 3):
    n = 2**stages
    net = build_ghz(stages, phi=math.pi / 3)
    logical = extract_logical(simulate(net).final_state, net.encoding)
    print(f"N={n}: F = {fidelity(logical, target_ghz(n, math.pi / 3)):.12f}",
          {k: f"{v:.3f}" for k, v in logical.amplitudes.items()})

# %% [markdown]
# The cluster circuit mixes the two photons of a dual-rail Bell pair
# and rotates one of them into the conjugate basis. A second doubling stage
# then copies each logical value onto two qubits. The phase settings depend
# on the splitter convention. The published values assume a different one,
# so they need recalibrating here.

# %%
for label, phases in [("published", PUBLISHED_CLUSTER4_PHASES), ("calibrated", CALIBRATED_CLUSTER4_PHASES)]:
    net = build_cluster4(phases)
    logical = extract_logical(simulate(net).final_state, net.encoding)
    print(f"{label:>10} phases: F = {fidelity(logical, target_cluster4()):.6f}")

phases, f = calibrate_cluster4()
print("optimizer from published start:", [f"{p / math.pi:.3f}pi" for p in phases], f"F = {f:.9f}")
