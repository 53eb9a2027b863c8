"""Dual-rail readout, target states and fidelity."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from .errors import DimensionMismatch
from .fock import StateVector, inner_product


@dataclass(frozen=True)
class QubitEncoding:
    """Ordered rail pairs; a photon in ``rail0`` reads as bit 0, in ``rail1`` as bit 1."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        flat = [m for pair in pairs for m in pair]
        if len(set(flat)) != len(flat):
            raise ValueError(f"encoding rails must be distinct: {pairs}")

    @property
    def n_qubits(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class LogicalState:
    """Amplitudes over bit strings (qubit 0 is the leftmost character)."""

    amplitudes: Mapping[str, complex]
    leakage: float = 0.0
    n_qubits: int = field(default=0)

    def __post_init__(self):
        amps = {k: complex(v) for k, v in self.amplitudes.items()}
        lengths = {len(k) for k in amps}
        if len(lengths) > 1:
            raise ValueError(f"bit strings of mixed length: {sorted(lengths)}")
        n = lengths.pop() if lengths else self.n_qubits
        if self.n_qubits and n != self.n_qubits:
            raise ValueError(f"bit strings have length {n}, expected {self.n_qubits}")
        object.__setattr__(self, "amplitudes", dict(sorted(amps.items())))
        object.__setattr__(self, "n_qubits", n)

    @property
    def logical_probability(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.amplitudes.values())


def _as_encoding(encoding) -> QubitEncoding:
    return encoding if isinstance(encoding, QubitEncoding) else QubitEncoding(tuple(encoding))


def extract_logical(state: StateVector, encoding: Union[QubitEncoding, Sequence[tuple[int, int]]]) -> LogicalState:
    """Map each term with one photon per rail pair and vacuum elsewhere to a bit string.

    All remaining probability (photons in residual or intermediate modes,
    bunching, missing photons) is reported as ``leakage``.
    """
    enc = _as_encoding(encoding)
    for m in (m for pair in enc.pairs for m in pair):
        if not 0 <= m < state.n_modes:
            raise IndexError(f"encoding mode {m} not in registry of {state.n_modes} modes")
    rails = {m for pair in enc.pairs for m in pair}
    others = [m for m in range(state.n_modes) if m not in rails]
    amps: dict[str, complex] = defaultdict(complex)
    leaked = []
    for occ, amp in state.items():
        bits = []
        for r0, r1 in enc.pairs:
            pattern = (occ[r0], occ[r1])
            if pattern == (1, 0):
                bits.append("0")
            elif pattern == (0, 1):
                bits.append("1")
            else:
                break
        if len(bits) == enc.n_qubits and all(occ[m] == 0 for m in others):
            amps["".join(bits)] += amp
        else:
            leaked.append(abs(amp) ** 2)
    return LogicalState(dict(amps), math.fsum(leaked), enc.n_qubits)


def fidelity(state, target) -> float:
    """|<target|state>|^2 for two StateVectors or two LogicalStates."""
    if isinstance(state, StateVector) and isinstance(target, StateVector):
        if state.n_modes != target.n_modes:
            raise DimensionMismatch(f"{state.n_modes} vs {target.n_modes} modes")
        value = abs(inner_product(target, state)) ** 2
    elif isinstance(state, LogicalState) and isinstance(target, LogicalState):
        if state.n_qubits != target.n_qubits:
            raise DimensionMismatch(f"{state.n_qubits} vs {target.n_qubits} qubits")
        overlap = sum(t.conjugate() * state.amplitudes.get(k, 0j) for k, t in target.amplitudes.items())
        value = abs(overlap) ** 2
    else:
        raise DimensionMismatch(f"cannot compare {type(state).__name__} with {type(target).__name__}")
    return min(value, 1.0)


def target_ghz(n_qubits: int, phi: float = 0.0) -> LogicalState:
    if n_qubits < 2:
        raise ValueError(f"GHZ target needs at least 2 qubits, got {n_qubits}")
    s = 1 / math.sqrt(2)
    phase = complex(math.cos(phi), math.sin(phi))
    return LogicalState({"0" * n_qubits: s, "1" * n_qubits: s * phase})


def target_cluster4() -> LogicalState:
    return LogicalState({"0000": 0.5, "0011": 0.5, "1100": 0.5, "1111": -0.5})


def photon_number_distribution(state: StateVector) -> dict[int, float]:
    """Probability of each total photon count, residual modes included."""
    buckets: dict[int, list[float]] = defaultdict(list)
    for occ, amp in state.items():
        buckets[sum(occ)].append(abs(amp) ** 2)
    return {n: math.fsum(ps) for n, ps in sorted(buckets.items())}
