"""Imperfect conversion: heralded success rate and what survives it.

With efficiencies below one, the missing photons end up in residual modes.
Requiring every residual mode to stay empty keeps the ideal state.
The cost is a success probability equal to the product of all
conversion efficiencies.
"""

# %%
import math

import numpy as np

from pdu_forge.analysis import extract_logical, fidelity, target_ghz
from pdu_forge.circuit import build_ghz, residuals_vacuum, simulate
from pdu_forge.optics import PduParams

# %%
for eta in (1.0, 0.99, 0.95, 0.9, 0.8):
    p = PduParams(eta, eta, eta)
    for stages in (1, 2):
        net = build_ghz(stages, params=p)
        rep = simulate(net, postselect=residuals_vacuum(net))
        logical = extract_logical(rep.postselected_state, net.encoding)
        n_pdu = len(net.pdus)
        # the photon's arm holds 2**M - 1 PDUs and every one of them must fire
        expected = (eta**3) ** (2**stages - 1)
        print(f"eta={eta:.2f} N={2**stages}: P_success={rep.success_probability:.4f} "
              f"(arm product={expected:.4f}, {n_pdu} PDUs)  F={fidelity(logical, target_ghz(2**stages)):.6f}")

# %% [markdown]
# Only the PDUs in the arm the photon actually took count, so the success
# probability is eta^(3 (2**M - 1)) and not a product over all PDUs.
# Without postselection, the logical readout shows the loss as leakage:

# %%
net = build_ghz(2, params=PduParams(0.9, 0.9, 0.9))
final = simulate(net).final_state
print("leakage without heralding:", round(extract_logical(final, net.encoding).leakage, 6))
print("check:", round(1 - 0.9 ** 9, 6))

# %% A quick look at how unbalanced up-conversion arms trade off
grid = np.linspace(0.5, 1.0, 6)
print("     " + " ".join(f"{x:6.2f}" for x in grid))
for s in grid:
    row = []
    for i in grid:
        net = build_ghz(1, params=PduParams(1.0, s, i))
        row.append(simulate(net, postselect=residuals_vacuum(net)).success_probability)
    print(f"{s:4.2f} " + " ".join(f"{v:6.3f}" for v in row))
assert math.isclose(row[-1], 1.0)
