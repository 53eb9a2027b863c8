"""Doubling a single photon into 2**M photons.

Each PDU swaps one pump-band photon for two. A binary tree of M stages
therefore turns one photon into a 2**M photon Fock state, one photon per leaf.
"""

# %%
import time

from pdu_forge.analysis import photon_number_distribution
from pdu_forge.circuit import build_fock_chain, format_netlist, simulate

net = build_fock_chain(2)
print(format_netlist(net))

# %% Every PDU also owns three hidden residual modes, appended after the declared ones
print([m.path_label for m in net.registry if m.band.value == "Residual"][:3], "...")
print("registry size:", len(net.registry))

# %%
for m in range(1, 5):
    t0 = time.perf_counter()
    final = simulate(build_fock_chain(m)).final_state
    (occ, amp), = final.items()
    print(f"M={m}: {photon_number_distribution(final)}  amplitude {amp:.3f}  "
          f"({(time.perf_counter() - t0) * 1e3:.1f} ms)")

# %% [markdown]
# The global phase is (-i) per PDU, so M = 2 (three PDUs) ends on +i. It is
# unobservable for a single-term state but matters once branches interfere,
# as the next demo shows.
