"""
Device-physics calculator for LNOI photon-number doubling units.

Closed-form models for the microring down-converter and the waveguide
up-converters:

* cavity three-wave-mixing strength ``xi`` (rad/s) from material and mode data
* down-conversion efficiency ``sin^2(xi * t1)`` with ``t1 = 2 pi Q / omega``
* single-longitudinal-mode threshold ``Q > omega R / (c |1/n_s - 1/n_i|)``
* up-conversion efficiency ``sin^2(sqrt(kappa P) l)``

plus the sweeps behind the efficiency maps and a ``key = value`` config
format (SI units throughout).
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np
from scipy.optimize import minimize_scalar

from .constants import C, EPSILON_0, HBAR, MU_0
from .errors import ConfigError, DegenerateIndices, OutOfValidityRange

ENERGY_CONSERVATION_RTOL = 1e-4


@dataclass(frozen=True)
class SellmeierCoefficients:
    """``n^2 = A + sum_k B_k lam^2 / (lam^2 - C_k)`` with ``lam`` in micrometres.

    ``lambda_min``/``lambda_max`` bound the validity range in metres.
    """

    a: float
    b: tuple[float, ...]
    c: tuple[float, ...]
    lambda_min: float
    lambda_max: float
    source: str = ""

    def __post_init__(self):
        if len(self.b) != len(self.c):
            raise ValueError("Sellmeier B and C lists must have equal length")
        if not 0 < self.lambda_min < self.lambda_max:
            raise ValueError("Sellmeier validity range must satisfy 0 < min < max")


def sellmeier_index(coeffs: SellmeierCoefficients, wavelength: float) -> float:
    """Refractive index at ``wavelength`` (m)."""
    if not coeffs.lambda_min <= wavelength <= coeffs.lambda_max:
        raise OutOfValidityRange(
            f"wavelength {wavelength:g} m outside [{coeffs.lambda_min:g}, {coeffs.lambda_max:g}] m"
            + (f" ({coeffs.source})" if coeffs.source else "")
        )
    lam2 = (wavelength * 1e6) ** 2
    n2 = coeffs.a + sum(b * lam2 / (lam2 - c) for b, c in zip(coeffs.b, coeffs.c))
    if n2 <= 0:
        raise OutOfValidityRange(f"Sellmeier expression gives n^2={n2} at {wavelength:g} m")
    return math.sqrt(n2)


_BANDS = ("p", "s", "i", "sfg1", "sfg2")


@dataclass(frozen=True)
class DeviceConfig:
    """Physical parameters of one PDU (SI units).

    Effective indices may be omitted when a Sellmeier set is supplied; an
    explicit index always wins over the material model.
    """

    chi2: float  # m/V
    d_eff: float  # m/V
    radius: float  # m
    lambda_p: float
    lambda_s: float
    lambda_i: float
    lambda_sfg1: float
    lambda_sfg2: float
    a_eff: float  # m^2
    a_p: float
    a_s: float
    a_i: float
    a_sfg1: float
    a_sfg2: float
    n_p0: float | None = None
    n_s0: float | None = None
    n_i0: float | None = None
    n_sfg1: float | None = None
    n_sfg2: float | None = None
    sellmeier: SellmeierCoefficients | None = None
    omega_ref_wavelength: float | None = None  # defaults to lambda_i
    waveguide_length: float = 1e-2  # m
    calib_power: float | None = None  # W
    calib_length: float | None = None  # m

    def __post_init__(self):
        positive = ["radius", "waveguide_length"] + [f"lambda_{b}" for b in _BANDS] + [f"a_{b}" for b in _BANDS]
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("chi2", "d_eff", "a_eff"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("omega_ref_wavelength", "calib_power", "calib_length"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be > 0, got {value}")
        for band in _BANDS:
            explicit = getattr(self, f"n_{band}0" if band in ("p", "s", "i") else f"n_{band}")
            if explicit is None and self.sellmeier is None:
                raise ValueError(f"no index for band {band!r}: give n_{band} or a Sellmeier set")
            if self.index(band) <= 1:
                raise ValueError(f"effective index for {band!r} must exceed 1, got {self.index(band)}")
        mismatch = abs(1 / self.lambda_p - 1 / self.lambda_s - 1 / self.lambda_i) * self.lambda_p
        if mismatch > ENERGY_CONSERVATION_RTOL:
            warnings.warn(
                f"1/lambda_p - 1/lambda_s - 1/lambda_i off by {mismatch:.2e} (relative)",
                RuntimeWarning,
                stacklevel=3,
            )

    def wavelength(self, band: str) -> float:
        return getattr(self, f"lambda_{band}")

    def index(self, band: str) -> float:
        name = f"n_{band}0" if band in ("p", "s", "i") else f"n_{band}"
        explicit = getattr(self, name)
        if explicit is not None:
            return explicit
        return sellmeier_index(self.sellmeier, self.wavelength(band))

    def omega(self, band: str) -> float:
        return angular_frequency(self.wavelength(band))

    def wavevector(self, band: str) -> float:
        return 2 * math.pi * self.index(band) / self.wavelength(band)

    def area(self, band: str) -> float:
        return getattr(self, f"a_{band}")

    @property
    def omega_ref(self) -> float:
        """Frequency at which Q is quoted (idler wavelength unless overridden)."""
        return angular_frequency(self.omega_ref_wavelength or self.lambda_i)

    def with_radius(self, radius: float) -> "DeviceConfig":
        return replace(self, radius=radius)


def angular_frequency(wavelength: float) -> float:
    return 2 * math.pi * C / wavelength


# -- down-conversion ------------------------------------------------------------


def xi(config: DeviceConfig) -> float:
    """Cavity three-wave-mixing strength (rad/s)."""
    n_p, n_s, n_i = config.index("p"), config.index("s"), config.index("i")
    k_prod = config.wavevector("p") * config.wavevector("s") * config.wavevector("i")
    overlap = config.a_eff / math.sqrt(config.a_p * config.a_s * config.a_i)
    return (
        config.chi2
        / 12
        * math.sqrt(HBAR / (math.pi * EPSILON_0 * config.radius))
        * (C / (n_p * n_s * n_i)) ** 1.5
        * overlap
        * math.sqrt(k_prod)
    )


def interaction_time(q: float, omega: float) -> float:
    """t1 = 2 pi Q / omega (s): 2 pi times the photon lifetime in the ring."""
    return 2 * math.pi * q / omega


def eta_pdc(xi_value: float, q: float, omega: float) -> float:
    """Single-photon down-conversion efficiency ``sin^2(xi t1)``."""
    return math.sin(xi_value * interaction_time(q, omega)) ** 2


def q_required_dpdc(xi_value: float, omega: float) -> float:
    """Smallest Q giving unit down-conversion efficiency, ``omega / (4 xi)``."""
    if xi_value == 0:
        raise ZeroDivisionError("xi = 0: deterministic down-conversion is unreachable")
    return omega / (4 * xi_value)


def q_slm_min(config: DeviceConfig, omega_ref: float | None = None) -> float:
    """Q above which only one signal/idler longitudinal mode pair oscillates."""
    omega = config.omega_ref if omega_ref is None else omega_ref
    dn = abs(1 / config.index("s") - 1 / config.index("i"))
    if dn == 0:
        raise DegenerateIndices("n_s0 == n_i0: free spectral ranges coincide, SLM condition unattainable")
    return omega * config.radius / (C * dn)


# -- up-conversion --------------------------------------------------------------


def kappa(config: DeviceConfig, which: str = "SFG1") -> float:
    """SFG strength coefficient (W^-1 m^-2) from material and mode data.

    SFG1 up-converts the signal photon, SFG2 the idler photon.
    """
    which = which.upper()
    if which == "SFG1":
        photon, laser = "s", "sfg1"
    elif which == "SFG2":
        photon, laser = "i", "sfg2"
    else:
        raise ValueError(f"which must be 'SFG1' or 'SFG2', got {which!r}")
    omega_x, omega_p = config.omega(photon), config.omega("p")
    n_x, n_l, n_p = config.index(photon), config.index(laser), config.index("p")
    overlap = config.a_eff / math.sqrt(config.area(photon) * config.area(laser) * config.a_p)
    return (
        2
        * math.sqrt(EPSILON_0)
        * MU_0**1.5
        * (omega_x * omega_p / (n_x * n_l * n_p))
        * config.d_eff**2
        * overlap**2
    )


def kappa_from_calibration(p_star: float, l_star: float) -> float:
    """kappa that makes (p_star, l_star) the first unit-efficiency point."""
    if p_star <= 0 or l_star <= 0:
        raise ValueError("calibration power and length must be > 0")
    return (math.pi / (2 * l_star)) ** 2 / p_star


def eta_puc(kappa_value: float, power: float, length: float) -> float:
    if kappa_value < 0 or power < 0 or length < 0:
        raise ValueError("kappa, power and length must be >= 0")
    return math.sin(math.sqrt(kappa_value * power) * length) ** 2


def p_required_dpuc(kappa_value: float, length: float) -> float:
    """Laser power (W) for unit up-conversion in a waveguide of ``length`` (m)."""
    if kappa_value == 0 or length == 0:
        raise ZeroDivisionError("kappa and length must be non-zero")
    return (math.pi / (2 * length)) ** 2 / kappa_value


# -- sweeps ---------------------------------------------------------------------


@dataclass(frozen=True)
class SweepTable:
    """Rows of (axis values..., value); CSV header is the axis names then ``value_name``."""

    axes: tuple[str, ...]
    value_name: str
    data: np.ndarray = field(repr=False)

    @property
    def header(self) -> list[str]:
        return list(self.axes) + [self.value_name]

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.header.index(name)]

    def __len__(self) -> int:
        return self.data.shape[0]

    def to_csv(self, fp: TextIO | None = None) -> str | None:
        """Write CSV to ``fp``; returns the text when ``fp`` is None."""
        buf = io.StringIO() if fp is None else fp
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.data:
            writer.writerow([repr(float(x)) for x in row])
        return buf.getvalue() if fp is None else None


def _axis(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} range must be a non-empty 1-D sequence")
    if np.any(arr <= 0):
        raise ValueError(f"{name} values must be positive")
    if arr.size > 1 and np.any(np.diff(arr) <= 0):
        raise ValueError(f"{name} values must be strictly increasing")
    return arr


def sweep_eta_pdc(config: DeviceConfig, q_values: Sequence[float], omega: float | None = None) -> SweepTable:
    q = _axis(q_values, "Q")
    x = xi(config)
    w = config.omega_ref if omega is None else omega
    eta = np.array([eta_pdc(x, qq, w) for qq in q])
    return SweepTable(("Q",), "eta", np.column_stack([q, eta]))


def sweep_q_required_vs_radius(config: DeviceConfig, radii: Sequence[float], omega: float | None = None) -> SweepTable:
    r = _axis(radii, "R")
    w = config.omega_ref if omega is None else omega
    q = np.array([q_required_dpdc(xi(config.with_radius(rr)), w) for rr in r])
    return SweepTable(("R_m",), "q_required", np.column_stack([r, q]))


def sweep_eta_puc(kappa_value: float, powers: Sequence[float], lengths: Sequence[float]) -> SweepTable:
    """Efficiency map over (power, length); power is the outer (slow) axis."""
    p = _axis(powers, "P")
    l = _axis(lengths, "l")
    pp, ll = np.meshgrid(p, l, indexing="ij")
    eta = np.sin(np.sqrt(kappa_value * pp) * ll) ** 2
    return SweepTable(("P_W", "l_m"), "eta", np.column_stack([pp.ravel(), ll.ravel(), eta.ravel()]))


def dpuc_contour(kappa_value: float, powers: Sequence[float], l_max: float, n_grid: int = 4096) -> np.ndarray:
    """Length of first unit up-conversion for each power, found numerically.

    Brackets the first efficiency peak on a grid and refines it with bounded
    Brent maximization. Entries are NaN where no peak lies below ``l_max``.
    """
    p = _axis(powers, "P")
    grid = np.linspace(0.0, l_max, n_grid)
    out = np.full(p.shape, np.nan)
    for j, power in enumerate(p):
        def neg_eta(length, power=power):
            return -eta_puc(kappa_value, power, length)

        eta = np.sin(np.sqrt(kappa_value * power) * grid) ** 2
        drops = np.nonzero(np.diff(eta) < 0)[0]
        if drops.size == 0:
            continue
        k = drops[0]
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, n_grid - 1)]
        res = minimize_scalar(neg_eta, bounds=(lo, hi), method="bounded", options={"xatol": 1e-15 * l_max})
        out[j] = res.x
    return out


def design_summary(config: DeviceConfig) -> dict[str, float]:
    """Headline requirements for one PDU.

    Up-conversion power uses the calibration kappa when the config carries
    ``calib_power``/``calib_length``, else the material formula.
    """
    x = xi(config)
    k1, k2 = kappa(config, "SFG1"), kappa(config, "SFG2")
    summary = {
        "xi_rad_per_s": x,
        "q_slm_min": q_slm_min(config),
        "q_required_dpdc": q_required_dpdc(x, config.omega_ref),
        "t1_at_q_required_s": interaction_time(q_required_dpdc(x, config.omega_ref), config.omega_ref),
        "kappa_sfg1_formula": k1,
        "kappa_sfg2_formula": k2,
    }
    k_used = k1
    if config.calib_power is not None and config.calib_length is not None:
        k_used = kappa_from_calibration(config.calib_power, config.calib_length)
        summary["kappa_calibration"] = k_used
    summary["p_required_dpuc_w"] = p_required_dpuc(k_used, config.waveguide_length)
    summary["p_required_dpuc_sfg2_w"] = p_required_dpuc(k2, config.waveguide_length)
    return summary


# -- config files ---------------------------------------------------------------

_FLOAT_KEYS = {f.name for f in fields(DeviceConfig)} - {"sellmeier"}
_SELLMEIER_KEYS = {"sellmeier_a", "sellmeier_b", "sellmeier_c", "sellmeier_min", "sellmeier_max", "sellmeier_source"}
_REQUIRED = [
    "chi2", "d_eff", "radius",
    "lambda_p", "lambda_s", "lambda_i", "lambda_sfg1", "lambda_sfg2",
    "a_eff", "a_p", "a_s", "a_i", "a_sfg1", "a_sfg2",
]  # fmt: skip
_INDEX_KEYS = ["n_p0", "n_s0", "n_i0", "n_sfg1", "n_sfg2"]


def parse_config(text: str) -> DeviceConfig:
    """Parse ``key = value`` lines (``#`` comments). Unknown keys are rejected."""
    values: dict[str, float] = {}
    sell: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got {line!r}", line_no)
        if key != "sellmeier_source":
            # citation strings may contain '#'; numbers may carry trailing comments
            value = value.split("#", 1)[0].strip()
        if key in values or key in sell:
            raise ConfigError(f"duplicate key {key!r}", line_no)
        if key in _SELLMEIER_KEYS:
            sell[key] = value
            continue
        if key not in _FLOAT_KEYS:
            raise ConfigError(f"unknown key {key!r}", line_no)
        try:
            values[key] = float(value)
        except ValueError:
            raise ConfigError(f"value for {key!r} is not a number: {value!r}", line_no) from None

    missing = [k for k in _REQUIRED if k not in values]
    if not sell:
        missing += [k for k in _INDEX_KEYS if k not in values]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    sellmeier = None
    if sell:
        need = _SELLMEIER_KEYS - {"sellmeier_source"}
        absent = sorted(need - sell.keys())
        if absent:
            raise ConfigError("incomplete Sellmeier set, missing: " + ", ".join(absent))
        try:
            sellmeier = SellmeierCoefficients(
                a=float(sell["sellmeier_a"]),
                b=tuple(float(v) for v in sell["sellmeier_b"].split(",")),
                c=tuple(float(v) for v in sell["sellmeier_c"].split(",")),
                lambda_min=float(sell["sellmeier_min"]),
                lambda_max=float(sell["sellmeier_max"]),
                source=sell.get("sellmeier_source", ""),
            )
        except ValueError as exc:
            raise ConfigError(f"bad Sellmeier coefficients: {exc}") from None
    try:
        return DeviceConfig(sellmeier=sellmeier, **values)
    except (ValueError, OutOfValidityRange) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> DeviceConfig:
    return parse_config(Path(path).read_text())


BUILTIN_CONFIGS = ("calibration", "first_principles")


def builtin_config_text(name: str) -> str:
    if name not in BUILTIN_CONFIGS:
        raise ValueError(f"unknown built-in config {name!r}; choose from {BUILTIN_CONFIGS}")
    return resources.files("pdu_forge").joinpath("data").joinpath(f"{name}.cfg").read_text()


def load_builtin_config(name: str) -> DeviceConfig:
    return parse_config(builtin_config_text(name))
