"""
Element actions on sparse Fock states.

Linear elements (beam splitter, phase shifter, crosser) act through the
transformation of creation operators. The photon-number doubling unit (PDU)
acts on single-photon input terms only: a down-conversion stage with
amplitude ``-i sqrt(eta_pdc)`` followed by independent up-conversion of the
signal and idler photons back to the pump band. Every failure branch places
its photon in an explicit residual mode, so all elements are norm preserving.

Beam splitter convention (symmetric, ``i`` on reflection)::

    a+ -> cos(theta) a+ + i sin(theta) b+
    b+ -> i sin(theta) a+ + cos(theta) b+
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import NormViolation, OccupancyOverflow, PduOutputOccupied, PumpOccupancyUnsupported
from .fock import Occupation, StateVector, _check_mode, _squared_norm

NORM_TOLERANCE = 1e-10


@dataclass(frozen=True)
class PduParams:
    """Conversion efficiencies of one photon-number doubling unit."""

    eta_pdc: float = 1.0
    eta_puc_s: float = 1.0
    eta_puc_i: float = 1.0

    # converted-term phases: -i for down-conversion, +1 for up-conversion
    PDC_PHASE = -1j
    PUC_PHASE = 1.0

    def __post_init__(self):
        for name in ("eta_pdc", "eta_puc_s", "eta_puc_i"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0) or math.isnan(value):
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

    @property
    def conversion_probability(self) -> float:
        """Probability that both photons reach the pump-band outputs."""
        return self.eta_pdc * self.eta_puc_s * self.eta_puc_i


@dataclass(frozen=True)
class BeamSplitterSpec:
    """Beam splitter angle; ``conjugate`` flips the reflection phase to ``-i``.

    The conjugate splitter at the same angle is the inverse of the plain one.
    """

    theta: float = math.pi / 4
    conjugate: bool = False

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")

    @property
    def reflection(self) -> complex:
        r = math.sin(self.theta)
        return complex(0.0, -r if self.conjugate else r)


def _guarded(state: StateVector, terms: Mapping[Occupation, complex], element: str) -> StateVector:
    before = math.sqrt(_squared_norm(state.terms))
    after = math.sqrt(_squared_norm(terms))
    if abs(after - before) > NORM_TOLERANCE:
        raise NormViolation(f"{element}: norm changed from {before!r} to {after!r}")
    return state.with_terms(terms)


def _binomial_row(n: int, x: complex, y: complex) -> list[complex]:
    # coefficient of a^k b^(n-k) in (x a + y b)^n
    return [math.comb(n, k) * x**k * y ** (n - k) for k in range(n + 1)]


def apply_beamsplitter(
    state: StateVector, m1: int, m2: int, spec: BeamSplitterSpec = BeamSplitterSpec()
) -> StateVector:
    """Mix modes ``m1`` and ``m2`` (arbitrary occupations)."""
    _check_mode(state, m1)
    _check_mode(state, m2)
    if m1 == m2:
        raise ValueError("beam splitter needs two distinct modes")
    t = math.cos(spec.theta)
    r = spec.reflection
    n_max = state.n_max
    out: dict[Occupation, complex] = {}
    cache: dict[tuple[int, int], list[complex]] = {}
    for occ, amp in state.items():
        n1, n2 = occ[m1], occ[m2]
        key = (n1, n2)
        if key not in cache:
            row1 = _binomial_row(n1, t, r)  # a+^k b+^(n1-k)
            row2 = _binomial_row(n2, r, t)  # a+^j b+^(n2-j)
            total = n1 + n2
            coeffs = [0j] * (total + 1)
            for k, c1 in enumerate(row1):
                if c1 == 0:
                    continue
                for j, c2 in enumerate(row2):
                    coeffs[k + j] += c1 * c2
            scale = 1.0 / math.sqrt(math.factorial(n1) * math.factorial(n2))
            cache[key] = [
                c * scale * math.sqrt(math.factorial(p) * math.factorial(total - p))
                for p, c in enumerate(coeffs)
            ]
        total = n1 + n2
        for p, c in enumerate(cache[key]):
            if abs(c) < 1e-15:
                continue
            if p > n_max or total - p > n_max:
                raise OccupancyOverflow(
                    f"beam splitter ({m1},{m2}) output ({p},{total - p}) exceeds n_max={n_max}"
                )
            new = list(occ)
            new[m1], new[m2] = p, total - p
            new = tuple(new)
            out[new] = out.get(new, 0j) + amp * c
    return _guarded(state, out, "beam splitter")


def apply_phase(state: StateVector, mode: int, phi: float) -> StateVector:
    """Multiply each term by ``exp(i n phi)`` where ``n`` is the occupation of ``mode``."""
    _check_mode(state, mode)
    out = {}
    for occ, amp in state.items():
        n = occ[mode]
        out[occ] = amp * complex(math.cos(n * phi), math.sin(n * phi)) if n else amp
    return _guarded(state, out, "phase")


def apply_crosser(state: StateVector, m1: int, m2: int) -> StateVector:
    """Swap the occupations of two waveguides."""
    _check_mode(state, m1)
    _check_mode(state, m2)
    if m1 == m2:
        raise ValueError("crosser needs two distinct modes")
    out = {}
    for occ, amp in state.items():
        new = list(occ)
        new[m1], new[m2] = occ[m2], occ[m1]
        out[tuple(new)] = amp
    return _guarded(state, out, "crosser")


def apply_pdu(
    state: StateVector,
    in_mode: int,
    out_s: int,
    out_i: int,
    residual_modes: tuple[int, int, int],
    params: PduParams = PduParams(),
) -> StateVector:
    """Photon-number doubling unit.

    ``residual_modes`` is ``(pdc_fail, puc_s_fail, puc_i_fail)``. Terms with an
    empty input pass through unchanged; a single input photon is converted;
    two or more input photons raise :class:`PumpOccupancyUnsupported`.
    """
    pdc_fail, puc_s_fail, puc_i_fail = residual_modes
    targets = (out_s, out_i, pdc_fail, puc_s_fail, puc_i_fail)
    for m in (in_mode,) + targets:
        _check_mode(state, m)
    if len(set((in_mode,) + targets)) != 6:
        raise ValueError(f"PDU modes must be distinct: in={in_mode}, outputs/residuals={targets}")

    eta_pdc, eta_s, eta_i = params.eta_pdc, params.eta_puc_s, params.eta_puc_i
    conv = params.PDC_PHASE * math.sqrt(eta_pdc)
    up = params.PUC_PHASE
    # (amplitude, modes receiving one photon each)
    branches = [
        (math.sqrt(1.0 - eta_pdc), (pdc_fail,)),
        (conv * up * math.sqrt(eta_s) * up * math.sqrt(eta_i), (out_s, out_i)),
        (conv * up * math.sqrt(eta_s) * math.sqrt(1.0 - eta_i), (out_s, puc_i_fail)),
        (conv * math.sqrt(1.0 - eta_s) * up * math.sqrt(eta_i), (puc_s_fail, out_i)),
        (conv * math.sqrt(1.0 - eta_s) * math.sqrt(1.0 - eta_i), (puc_s_fail, puc_i_fail)),
    ]
    branches = [(a, modes) for a, modes in branches if a != 0]

    if state.n_max < 1:
        raise OccupancyOverflow("n_max must be at least 1 to hold PDU outputs")
    out: dict[Occupation, complex] = {}
    for occ, amp in state.items():
        n_in = occ[in_mode]
        if n_in == 0:
            out[occ] = out.get(occ, 0j) + amp
            continue
        if n_in >= 2:
            raise PumpOccupancyUnsupported(
                f"PDU input mode {in_mode} carries {n_in} photons; only 0 or 1 is modeled"
            )
        busy = [m for m in targets if occ[m]]
        if busy:
            raise PduOutputOccupied(f"PDU fired into occupied mode(s) {busy}")
        base = list(occ)
        base[in_mode] = 0
        for coeff, modes in branches:
            new = list(base)
            for m in modes:
                new[m] = 1
            new = tuple(new)
            out[new] = out.get(new, 0j) + amp * coeff
    return _guarded(state, out, "PDU")
