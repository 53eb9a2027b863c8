"""
Sparse multimode Fock states.

A :class:`StateVector` is a map from occupation tuples (one photon count per
declared mode, ordered by mode index) to complex amplitudes. Only terms with
non-negligible amplitude are stored, so states produced by cascaded
down-conversion stay small even when the mode registry grows to hundreds of
modes.

Every function here is pure: it returns a new state and never mutates its
arguments.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import OccupancyOverflow, RegistryMismatch

Occupation = tuple[int, ...]

DEFAULT_N_MAX = 4
DEFAULT_PRUNE_EPSILON = 1e-14
NMAX_ENV_VAR = "PDU_FORGE_NMAX"


def default_n_max() -> int:
    """Occupation cap, overridable through ``PDU_FORGE_NMAX``."""
    raw = os.environ.get(NMAX_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_N_MAX
    value = int(raw)
    if value < 1:
        raise ValueError(f"{NMAX_ENV_VAR} must be >= 1, got {value}")
    return value


class Band(enum.Enum):
    PUMP = "Pump"
    SIGNAL = "Signal"
    IDLER = "Idler"
    RESIDUAL = "Residual"

    @classmethod
    def parse(cls, text: str) -> "Band":
        for band in cls:
            if band.value.lower() == text.lower():
                return band
        raise ValueError(f"unknown band {text!r}")


@dataclass(frozen=True)
class ModeDescriptor:
    """A spatial path tagged with its frequency band."""

    index: int
    path_label: str
    band: Band = Band.PUMP

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"mode index must be non-negative, got {self.index}")
        if not self.path_label or any(ch.isspace() for ch in self.path_label):
            raise ValueError(f"path label must be non-empty without whitespace: {self.path_label!r}")


Registry = tuple[ModeDescriptor, ...]


def make_registry(labels: int | Sequence[str], band: Band = Band.PUMP) -> Registry:
    """Build a contiguous registry from a mode count or a list of path labels."""
    if isinstance(labels, int):
        labels = [f"m{k}" for k in range(labels)]
    return tuple(ModeDescriptor(k, label, band) for k, label in enumerate(labels))


def check_registry(registry: Sequence[ModeDescriptor]) -> None:
    if len(registry) == 0:
        raise ValueError("registry must declare at least one mode")
    for position, mode in enumerate(registry):
        if mode.index != position:
            raise ValueError(
                f"mode indices must be unique and contiguous from 0; "
                f"position {position} holds index {mode.index}"
            )


class StateVector:
    """Normalized superposition of occupation-number basis states.

    Parameters
    ----------
    registry : sequence of ModeDescriptor
        Declared modes; occupation tuples have one entry per mode.
    terms : mapping
        Occupation tuple -> complex amplitude. Terms below ``prune_epsilon``
        in magnitude are dropped on construction.
    n_max : int, optional
        Per-mode occupation cap. Defaults to :func:`default_n_max`.
    prune_epsilon : float
        Amplitude magnitude below which terms are discarded.
    """

    __slots__ = ("_registry", "_terms", "_n_max", "_prune_epsilon")

    def __init__(
        self,
        registry: Sequence[ModeDescriptor],
        terms: Mapping[Occupation, complex],
        n_max: int | None = None,
        prune_epsilon: float = DEFAULT_PRUNE_EPSILON,
    ):
        registry = tuple(registry)
        check_registry(registry)
        n_max = default_n_max() if n_max is None else int(n_max)
        if not 0 <= prune_epsilon < 1:
            raise ValueError(f"prune_epsilon must lie in [0, 1), got {prune_epsilon}")
        n_modes = len(registry)
        clean: dict[Occupation, complex] = {}
        for occ, amp in terms.items():
            occ = tuple(int(n) for n in occ)
            if len(occ) != n_modes:
                raise RegistryMismatch(f"occupation {occ} has {len(occ)} entries, registry has {n_modes}")
            if any(n < 0 for n in occ):
                raise ValueError(f"negative occupation in {occ}")
            if any(n > n_max for n in occ):
                raise OccupancyOverflow(f"occupation {occ} exceeds n_max={n_max}")
            amp = complex(amp)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise ValueError(f"non-finite amplitude {amp} for {occ}")
            if abs(amp) < prune_epsilon or amp == 0:
                continue
            clean[occ] = amp
        self._registry = registry
        self._terms = clean
        self._n_max = n_max
        self._prune_epsilon = float(prune_epsilon)

    @property
    def registry(self) -> Registry:
        return self._registry

    @property
    def terms(self) -> Mapping[Occupation, complex]:
        return MappingProxyType(self._terms)

    @property
    def n_modes(self) -> int:
        return len(self._registry)

    @property
    def n_max(self) -> int:
        return self._n_max

    @property
    def prune_epsilon(self) -> float:
        return self._prune_epsilon

    def amplitude(self, occupation: Iterable[int]) -> complex:
        return self._terms.get(tuple(occupation), 0j)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        body = ", ".join(f"{occ}: {amp:.6g}" for occ, amp in sorted(self._terms.items()))
        return f"StateVector({{{body}}})"

    def with_terms(self, terms: Mapping[Occupation, complex], registry=None) -> "StateVector":
        """Same settings, new terms (no renormalization)."""
        return StateVector(
            self._registry if registry is None else registry,
            terms,
            n_max=self._n_max,
            prune_epsilon=self._prune_epsilon,
        )


def _squared_norm(terms: Mapping[Occupation, complex]) -> float:
    return math.fsum(abs(a) ** 2 for a in terms.values())


def _normalized(terms: Mapping[Occupation, complex]) -> dict[Occupation, complex]:
    total = math.sqrt(_squared_norm(terms))
    if total == 0:
        raise ValueError("cannot normalize the zero vector")
    return {occ: amp / total for occ, amp in terms.items()}


def vacuum(
    registry: int | Sequence[ModeDescriptor],
    n_max: int | None = None,
    prune_epsilon: float = DEFAULT_PRUNE_EPSILON,
) -> StateVector:
    if isinstance(registry, int):
        registry = make_registry(registry)
    zeros = (0,) * len(registry)
    return StateVector(registry, {zeros: 1 + 0j}, n_max=n_max, prune_epsilon=prune_epsilon)


def basis_state(
    registry: int | Sequence[ModeDescriptor],
    occupation: Sequence[int],
    n_max: int | None = None,
) -> StateVector:
    """The single Fock basis state ``|occupation>``."""
    if isinstance(registry, int):
        registry = make_registry(registry)
    return StateVector(registry, {tuple(occupation): 1 + 0j}, n_max=n_max)


def from_amplitudes(
    registry: int | Sequence[ModeDescriptor],
    terms: Mapping[Occupation, complex],
    n_max: int | None = None,
) -> StateVector:
    """Build a state from arbitrary amplitudes and normalize it."""
    if isinstance(registry, int):
        registry = make_registry(registry)
    return StateVector(registry, _normalized(dict(terms)), n_max=n_max)


def add_photon_raw(terms: Mapping[Occupation, complex], mode: int, n_max: int) -> dict[Occupation, complex]:
    """Apply a bare creation operator (with the sqrt(n+1) factor, no renormalization)."""
    out: dict[Occupation, complex] = {}
    for occ, amp in terms.items():
        n = occ[mode]
        if n + 1 > n_max:
            raise OccupancyOverflow(f"mode {mode} would hold {n + 1} photons (n_max={n_max})")
        new = occ[:mode] + (n + 1,) + occ[mode + 1:]
        out[new] = out.get(new, 0j) + amp * math.sqrt(n + 1)
    return out


def create_photon(state: StateVector, mode: int) -> StateVector:
    """Add one photon to ``mode`` and renormalize."""
    _check_mode(state, mode)
    raw = add_photon_raw(state.terms, mode, state.n_max)
    return state.with_terms(_normalized(raw))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, antilinear in the first argument."""
    if a.n_modes != b.n_modes:
        raise RegistryMismatch(f"registries differ in size: {a.n_modes} vs {b.n_modes}")
    small, large, conj_small = (a, b, True) if len(a) <= len(b) else (b, a, False)
    acc = 0j
    for occ, amp in small.items():
        other = large.amplitude(occ)
        if other:
            acc += amp.conjugate() * other if conj_small else other.conjugate() * amp
    return acc


def norm(state: StateVector) -> float:
    return math.sqrt(_squared_norm(state.terms))


def prune(state: StateVector, epsilon: float | None = None) -> StateVector:
    """Drop terms with ``|amplitude| < epsilon`` and renormalize.

    ``epsilon`` defaults to the state's own ``prune_epsilon``; values >= 1 are
    rejected since they would delete every normalized term.
    """
    eps = state.prune_epsilon if epsilon is None else float(epsilon)
    if not 0 <= eps < 1:
        raise ValueError(f"prune epsilon must lie in [0, 1), got {eps}")
    kept = {occ: amp for occ, amp in state.items() if abs(amp) >= eps}
    if not kept:
        raise ValueError("pruning removed every term")
    return state.with_terms(_normalized(kept))


def extend_registry(state: StateVector, new_modes: int | Sequence[ModeDescriptor]) -> StateVector:
    """Append vacuum modes to the registry."""
    start = state.n_modes
    if isinstance(new_modes, int):
        new_modes = [ModeDescriptor(start + k, f"m{start + k}") for k in range(new_modes)]
    new_modes = tuple(new_modes)
    registry = state.registry + new_modes
    pad = (0,) * len(new_modes)
    return state.with_terms({occ + pad: amp for occ, amp in state.items()}, registry=registry)


def total_photons(occupation: Occupation) -> int:
    return sum(occupation)


def _check_mode(state: StateVector, mode: int) -> None:
    if not 0 <= mode < state.n_modes:
        raise IndexError(f"mode {mode} not in registry of {state.n_modes} modes")
