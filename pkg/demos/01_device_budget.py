"""What does one photon-number doubling unit ask of the hardware?

Walks through the ring (down-conversion) and waveguide (up-conversion)
requirements for both shipped parameter sets, then writes two small sweeps
to CSV for plotting elsewhere.
"""

# %%
import numpy as np

from pdu_forge import device as dev

cal = dev.load_builtin_config("calibration")
fp = dev.load_builtin_config("first_principles")

for name, cfg in [("calibration", cal), ("first_principles", fp)]:
    s = dev.design_summary(cfg)
    print(f"{name:>17}: Q_SLM={s['q_slm_min']:.3g}  Q_DPDC={s['q_required_dpdc']:.3g}  "
          f"P_DPUC={s['p_required_dpuc_w'] * 1e3:.3g} mW")

# %% [markdown]
# The ring has to clear two bars. Above Q_SLM only one signal/idler mode
# pair resonates. Q_DPDC puts the first efficiency peak exactly at one
# cavity lifetime. Since Q_DPDC >> Q_SLM, the single-mode condition comes for free.

# %%
xi = dev.xi(cal)
q1 = dev.q_required_dpdc(xi, cal.omega_ref)
for k in (0.5, 1, 2, 3):
    print(f"Q = {k:>3} * Q1 -> eta_PDC = {dev.eta_pdc(xi, k * q1, cal.omega_ref):.4f}")

# %% [markdown]
# Overshooting Q is not harmless: the photon converts back and the
# efficiency oscillates. Smaller rings have larger xi and a lower bar.

# %%
radii = np.array([10, 20, 30, 50, 80]) * 1e-6
table = dev.sweep_q_required_vs_radius(cal, radii)
for r, q in table.data:
    print(f"R = {r * 1e6:4.0f} um -> Q_DPDC = {q:.3g}")

# %% Up-conversion: power against waveguide length
k = dev.kappa_from_calibration(cal.calib_power, cal.calib_length)
for l_cm in (0.5, 1, 2):
    print(f"l = {l_cm} cm -> P = {dev.p_required_dpuc(k, l_cm * 1e-2) * 1e3:.3g} mW")

powers = np.linspace(1e-3, 40e-3, 8)
contour = dev.dpuc_contour(k, powers, l_max=5e-2)
print("first unit-efficiency length (cm):", np.round(contour * 100, 3))

# %%
with open("eta_pdc_sweep.csv", "w") as fp_out:
    dev.sweep_eta_pdc(cal, np.linspace(1e5, 2e8, 400)).to_csv(fp_out)
print("wrote eta_pdc_sweep.csv")
