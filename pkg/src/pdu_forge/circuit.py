"""
Netlists, the sequential simulator, and builders for the three circuit families.

Components are applied in list order to the vacuum. Each PDU owns three
residual modes (``pdc_fail``, ``puc_s_fail``, ``puc_i_fail``) that are
allocated automatically by :meth:`Netlist.assemble` and appended after the
declared modes, in PDU order. Residual modes are part of the state but never
of the logical readout.

Text format, one component per line::

    mode <idx> <path_label> <band>
    source <mode>
    bs <m1> <m2> <theta_rad>
    phase <m> <phi_rad>
    cross <m1> <m2>
    pdu <in> <out_s> <out_i> <eta_pdc> <eta_puc_s> <eta_puc_i>

``#`` starts a comment. Two comment forms carry metadata and survive a
round trip: ``# name: <name>`` and ``# encoding: <r0>,<r1> <r0>,<r1> ...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence, Union

from .errors import InvalidNetlist, NetlistSyntaxError
from .fock import Band, ModeDescriptor, Occupation, StateVector, create_photon, vacuum
from .optics import (
    BeamSplitterSpec,
    PduParams,
    apply_beamsplitter,
    apply_crosser,
    apply_pdu,
    apply_phase,
)

DEFAULT_MAX_STAGES = 6
TWO_PI = 2 * math.pi


# -- components ---------------------------------------------------------------


@dataclass(frozen=True)
class Source:
    mode: int
    kind = "source"

    def modes(self) -> tuple[int, ...]:
        return (self.mode,)

    def apply(self, state: StateVector) -> StateVector:
        return create_photon(state, self.mode)


@dataclass(frozen=True)
class BeamSplitter:
    m1: int
    m2: int
    theta: float = math.pi / 4
    kind = "bs"

    def modes(self) -> tuple[int, ...]:
        return (self.m1, self.m2)

    def apply(self, state: StateVector) -> StateVector:
        return apply_beamsplitter(state, self.m1, self.m2, BeamSplitterSpec(self.theta))


@dataclass(frozen=True)
class Phase:
    mode: int
    phi: float
    kind = "phase"

    def modes(self) -> tuple[int, ...]:
        return (self.mode,)

    def apply(self, state: StateVector) -> StateVector:
        return apply_phase(state, self.mode, self.phi)


@dataclass(frozen=True)
class Crosser:
    m1: int
    m2: int
    kind = "cross"

    def modes(self) -> tuple[int, ...]:
        return (self.m1, self.m2)

    def apply(self, state: StateVector) -> StateVector:
        return apply_crosser(state, self.m1, self.m2)


@dataclass(frozen=True)
class Pdu:
    in_mode: int
    out_s: int
    out_i: int
    params: PduParams = PduParams()
    residuals: tuple[int, int, int] | None = None
    kind = "pdu"

    def modes(self) -> tuple[int, ...]:
        return (self.in_mode, self.out_s, self.out_i) + (self.residuals or ())

    def apply(self, state: StateVector) -> StateVector:
        if self.residuals is None:
            raise InvalidNetlist(["PDU residual modes were never allocated; build the netlist with Netlist.assemble"])
        return apply_pdu(state, self.in_mode, self.out_s, self.out_i, self.residuals, self.params)


Component = Union[Source, BeamSplitter, Phase, Crosser, Pdu]
QubitPairs = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Netlist:
    registry: tuple[ModeDescriptor, ...]
    components: tuple[Component, ...]
    name: str = "netlist"
    encoding: QubitPairs | None = None
    line_numbers: tuple[int, ...] | None = field(default=None, compare=False)

    @classmethod
    def assemble(
        cls,
        declared: Sequence[ModeDescriptor],
        components: Iterable[Component],
        name: str = "netlist",
        encoding: Sequence[tuple[int, int]] | None = None,
        line_numbers: Sequence[int] | None = None,
    ) -> "Netlist":
        """Allocate residual modes for every PDU and freeze the netlist."""
        registry = list(declared)
        resolved = []
        pdu_ordinal = 0
        for comp in components:
            if isinstance(comp, Pdu):
                if comp.residuals is None:
                    base = len(registry)
                    for offset, tag in enumerate(("pdc_fail", "puc_s_fail", "puc_i_fail")):
                        registry.append(ModeDescriptor(base + offset, f"pdu{pdu_ordinal}.{tag}", Band.RESIDUAL))
                    comp = replace(comp, residuals=(base, base + 1, base + 2))
                pdu_ordinal += 1
            resolved.append(comp)
        enc = None if encoding is None else tuple((int(a), int(b)) for a, b in encoding)
        return cls(
            tuple(registry),
            tuple(resolved),
            name,
            enc,
            None if line_numbers is None else tuple(line_numbers),
        )

    @property
    def residual_modes(self) -> tuple[int, ...]:
        return tuple(m.index for m in self.registry if m.band is Band.RESIDUAL)

    @property
    def pdus(self) -> tuple[Pdu, ...]:
        return tuple(c for c in self.components if isinstance(c, Pdu))

    def output_modes(self) -> tuple[int, ...]:
        """Non-residual modes written by a PDU or source and never consumed by a later PDU."""
        produced: list[int] = []
        consumed: set[int] = set()
        for comp in self.components:
            if isinstance(comp, Source):
                produced.append(comp.mode)
            elif isinstance(comp, Pdu):
                consumed.add(comp.in_mode)
                produced.extend((comp.out_s, comp.out_i))
        seen = set()
        outputs = []
        for m in produced:
            if m not in consumed and m not in seen:
                seen.add(m)
                outputs.append(m)
        return tuple(outputs)


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    index: int | None
    message: str

    def __str__(self) -> str:
        where = "netlist" if self.index is None else str(self.index)
        return f"{self.kind}@{where}: {self.message}"


def validate(netlist: Netlist) -> list[Diagnostic]:
    """Return an empty list iff the netlist is well formed."""
    diags: list[Diagnostic] = []
    reg = netlist.registry
    n = len(reg)
    if n == 0:
        diags.append(Diagnostic("EmptyRegistry", None, "no modes declared"))
    for pos, mode in enumerate(reg):
        if mode.index != pos:
            diags.append(Diagnostic("RegistryError", None, f"position {pos} holds mode index {mode.index}"))

    consumed_by: dict[int, int] = {}
    touched: set[int] = set()
    for k, comp in enumerate(netlist.components):
        modes = comp.modes()
        unknown = [m for m in modes if not 0 <= m < n]
        if unknown:
            diags.append(Diagnostic("UnknownMode", k, f"{comp.kind} references undeclared mode(s) {unknown}"))
            continue
        if isinstance(comp, (BeamSplitter, Crosser)) and comp.m1 == comp.m2:
            diags.append(Diagnostic("DuplicateMode", k, f"{comp.kind} uses mode {comp.m1} twice"))
        if isinstance(comp, BeamSplitter) and not 0 <= comp.theta <= math.pi / 2:
            diags.append(Diagnostic("InvalidParameter", k, f"theta {comp.theta} outside [0, pi/2]"))
        reused = [m for m in modes if m in consumed_by]
        if reused:
            diags.append(
                Diagnostic(
                    "TopologyViolation",
                    k,
                    f"mode(s) {reused} already consumed by PDU input at component "
                    f"{consumed_by[reused[0]]}",
                )
            )
        if isinstance(comp, Pdu):
            if comp.residuals is None:
                diags.append(Diagnostic("UnallocatedResiduals", k, "PDU residual modes not allocated"))
            if len(set(modes)) != len(modes):
                diags.append(Diagnostic("DuplicateMode", k, f"PDU modes not distinct: {modes}"))
            for role, m in (("input", comp.in_mode), ("out_s", comp.out_s), ("out_i", comp.out_i)):
                if reg[m].band is not Band.PUMP:
                    diags.append(Diagnostic("BandMismatch", k, f"PDU {role} mode {m} has band {reg[m].band.value}"))
            for m in comp.residuals or ():
                if reg[m].band is not Band.RESIDUAL:
                    diags.append(Diagnostic("BandMismatch", k, f"PDU residual mode {m} has band {reg[m].band.value}"))
            fresh = (comp.out_s, comp.out_i) + (comp.residuals or ())
            early = [m for m in fresh if m in touched]
            if early:
                diags.append(
                    Diagnostic("TopologyViolation", k, f"PDU output/residual mode(s) {early} used upstream")
                )
            consumed_by[comp.in_mode] = k
        touched.update(modes)

    if netlist.encoding is not None:
        flat = [m for pair in netlist.encoding for m in pair]
        if len(set(flat)) != len(flat):
            diags.append(Diagnostic("EncodingError", None, "encoding rails are not distinct"))
        for m in flat:
            if not 0 <= m < n:
                diags.append(Diagnostic("EncodingError", None, f"encoding references undeclared mode {m}"))
            elif reg[m].band is not Band.PUMP:
                diags.append(Diagnostic("EncodingError", None, f"encoding rail {m} is not pump band"))
    return diags


# -- simulation ---------------------------------------------------------------

Predicate = Callable[[Occupation], bool]


@dataclass(frozen=True)
class SimulationReport:
    final_state: StateVector
    success_probability: float
    postselected_state: StateVector | None


def postselect_state(state: StateVector, predicate: Predicate) -> tuple[float, StateVector | None]:
    kept = {occ: amp for occ, amp in state.items() if predicate(occ)}
    prob = math.fsum(abs(a) ** 2 for a in kept.values())
    prob = min(max(prob, 0.0), 1.0)
    if prob == 0.0:
        return 0.0, None
    scale = 1.0 / math.sqrt(prob)
    return prob, state.with_terms({occ: amp * scale for occ, amp in kept.items()})


def simulate(
    netlist: Netlist,
    postselect: Predicate | None = None,
    n_max: int | None = None,
) -> SimulationReport:
    """Apply every component in order to the vacuum.

    Element errors propagate unchanged, tagged with a ``component_index``
    attribute naming the failing component.
    """
    diags = validate(netlist)
    if diags:
        raise InvalidNetlist(diags)
    state = vacuum(netlist.registry, n_max=n_max)
    for k, comp in enumerate(netlist.components):
        try:
            state = comp.apply(state)
        except Exception as exc:
            exc.component_index = k
            raise
    if postselect is None:
        return SimulationReport(state, 1.0, None)
    prob, selected = postselect_state(state, postselect)
    return SimulationReport(state, prob, selected)


def residuals_vacuum(netlist: Netlist) -> Predicate:
    """Predicate: no photon left in any residual mode (every PDU fully converted)."""
    residuals = netlist.residual_modes

    def predicate(occ: Occupation) -> bool:
        return all(occ[m] == 0 for m in residuals)

    return predicate


def one_photon_per_pair(pairs: Sequence[tuple[int, int]]) -> Predicate:
    """Predicate: exactly one photon in each rail pair, vacuum everywhere else."""
    rails = {m for pair in pairs for m in pair}

    def predicate(occ: Occupation) -> bool:
        if any(occ[a] + occ[b] != 1 for a, b in pairs):
            return False
        return all(n == 0 for m, n in enumerate(occ) if m not in rails)

    return predicate


# -- builders -----------------------------------------------------------------


def _check_stages(stages: int, max_stages: int) -> None:
    if stages < 1:
        raise ValueError(f"stages must be >= 1, got {stages}")
    if stages > max_stages:
        raise ValueError(f"stages={stages} exceeds the state-space guard max_stages={max_stages}")


def _cascade(declared: list[ModeDescriptor], components: list, root: int, stages: int, params: PduParams, tag: str) -> list[int]:
    """Binary tree of PDUs rooted at ``root``; returns the leaf modes in order."""
    level = [root]
    for stage in range(1, stages + 1):
        nxt = []
        for j, m in enumerate(level):
            s = len(declared)
            declared.append(ModeDescriptor(s, f"{tag}{stage}.{2 * j}"))
            declared.append(ModeDescriptor(s + 1, f"{tag}{stage}.{2 * j + 1}"))
            components.append(Pdu(m, s, s + 1, params))
            nxt.extend((s, s + 1))
        level = nxt
    return level


def build_fock_chain(stages: int, params: PduParams = PduParams(), max_stages: int = DEFAULT_MAX_STAGES) -> Netlist:
    """One source feeding ``2**stages - 1`` PDUs in a binary tree."""
    _check_stages(stages, max_stages)
    declared = [ModeDescriptor(0, "in")]
    components: list = [Source(0)]
    _cascade(declared, components, 0, stages, params, "s")
    return Netlist.assemble(declared, components, name=f"fock_M{stages}")


def _wrap(phi: float) -> float:
    return math.fmod(phi, TWO_PI) % TWO_PI


def build_ghz(
    stages: int,
    phi: float = 0.0,
    params: PduParams = PduParams(),
    max_stages: int = DEFAULT_MAX_STAGES,
) -> Netlist:
    """N = 2**stages qubit GHZ state (|0..0> + e^{i phi}|1..1>)/sqrt(2).

    A 50:50 splitter puts the pump photon on two branches; a phase shifter on
    the second branch cancels the reflection ``i`` and applies ``phi``. Each
    branch runs an identical Fock chain, so qubit ``j`` is the rail pair
    (leaf ``j`` of branch 0, leaf ``j`` of branch 1).
    """
    _check_stages(stages, max_stages)
    declared = [ModeDescriptor(0, "a"), ModeDescriptor(1, "b")]
    components: list = [Source(0), BeamSplitter(0, 1, math.pi / 4), Phase(1, _wrap(phi - math.pi / 2))]
    leaves_a = _cascade(declared, components, 0, stages, params, "a")
    leaves_b = _cascade(declared, components, 1, stages, params, "b")
    return Netlist.assemble(
        declared, components, name=f"ghz_M{stages}", encoding=list(zip(leaves_a, leaves_b))
    )


# Published phase settings; they assume a different splitter convention.
PUBLISHED_CLUSTER4_PHASES = (math.pi / 2, 7 * math.pi / 4, math.pi / 2, math.pi / 4)
# Values for this module's symmetric splitter; reproduced by calibrate_cluster4().
CALIBRATED_CLUSTER4_PHASES = (3 * math.pi / 2, 3 * math.pi / 2, 3 * math.pi / 2, 0.0)


def build_cluster4(
    phases: Sequence[float] = CALIBRATED_CLUSTER4_PHASES,
    params: PduParams = PduParams(),
) -> Netlist:
    """Four-qubit linear cluster state from one photon and two PDU stages.

    Stage 1 splits the photon (phase ``phi1``) and doubles each branch, giving a
    dual-rail Bell pair. A crosser brings the rails of each photon together;
    ``phi2``/splitter/``phi3`` rotate the second photon to the conjugate basis,
    and ``phi4`` trims the first. Stage 2 doubles each rail, copying every
    logical value onto two qubits.
    """
    phi1, phi2, phi3, phi4 = (float(p) for p in phases)
    declared = [ModeDescriptor(0, "src"), ModeDescriptor(1, "src.b")]
    components: list = [Source(0), BeamSplitter(0, 1, math.pi / 4), Phase(1, phi1)]
    for k, root in enumerate((0, 1)):
        s = len(declared)
        declared += [ModeDescriptor(s, f"st1.{2 * k}"), ModeDescriptor(s + 1, f"st1.{2 * k + 1}")]
        components.append(Pdu(root, s, s + 1, params))
    # modes 2,3 from branch 0 and 4,5 from branch 1; swap 3<->4 so that
    # (2,3) carry photon A and (4,5) photon B
    components.append(Crosser(3, 4))
    components += [Phase(5, phi2), BeamSplitter(4, 5, math.pi / 4), Phase(5, phi3), Phase(3, phi4)]
    leaves = {}
    for rail in (2, 3, 4, 5):
        s = len(declared)
        declared += [ModeDescriptor(s, f"st2.{rail}a"), ModeDescriptor(s + 1, f"st2.{rail}b")]
        components.append(Pdu(rail, s, s + 1, params))
        leaves[rail] = (s, s + 1)
    encoding = [
        (leaves[2][0], leaves[3][0]),
        (leaves[2][1], leaves[3][1]),
        (leaves[4][0], leaves[5][0]),
        (leaves[4][1], leaves[5][1]),
    ]
    return Netlist.assemble(declared, components, name="cluster4", encoding=encoding)


def calibrate_cluster4(start: Sequence[float] = PUBLISHED_CLUSTER4_PHASES, target=None) -> tuple[tuple[float, ...], float]:
    """Tune the four cluster phases to maximize fidelity with the cluster target.

    Returns ``(phases, fidelity)`` with phases wrapped to ``[0, 2 pi)``.
    """
    import numpy as np
    from scipy.optimize import minimize

    from .analysis import extract_logical, fidelity, target_cluster4

    target = target_cluster4() if target is None else target

    def infidelity(x):
        netlist = build_cluster4(tuple(x))
        logical = extract_logical(simulate(netlist).final_state, netlist.encoding)
        return 1.0 - fidelity(logical, target)

    best = None
    starts = [np.asarray(start, dtype=float)]
    # deterministic restarts on a coarse lattice in case the first start is a saddle
    grid = np.arange(4) * (math.pi / 2)
    starts += [np.array([a, b, c, 0.0]) for a in grid for b in grid for c in grid]
    for x0 in starts:
        res = minimize(infidelity, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
        if best is None or res.fun < best.fun:
            best = res
        if best.fun < 1e-12:
            break
    phases = tuple(_wrap(float(p)) for p in best.x)
    return phases, 1.0 - float(best.fun)


# -- text format --------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def format_netlist(netlist: Netlist) -> str:
    """Canonical text form; residual modes are implicit and omitted."""
    lines = [f"# name: {netlist.name}"]
    if netlist.encoding is not None:
        lines.append("# encoding: " + " ".join(f"{a},{b}" for a, b in netlist.encoding))
    for mode in netlist.registry:
        if mode.band is Band.RESIDUAL:
            continue
        lines.append(f"mode {mode.index} {mode.path_label} {mode.band.value}")
    for comp in netlist.components:
        if isinstance(comp, Source):
            lines.append(f"source {comp.mode}")
        elif isinstance(comp, BeamSplitter):
            lines.append(f"bs {comp.m1} {comp.m2} {_fmt(comp.theta)}")
        elif isinstance(comp, Phase):
            lines.append(f"phase {comp.mode} {_fmt(comp.phi)}")
        elif isinstance(comp, Crosser):
            lines.append(f"cross {comp.m1} {comp.m2}")
        elif isinstance(comp, Pdu):
            p = comp.params
            lines.append(
                f"pdu {comp.in_mode} {comp.out_s} {comp.out_i} "
                f"{_fmt(p.eta_pdc)} {_fmt(p.eta_puc_s)} {_fmt(p.eta_puc_i)}"
            )
        else:  # pragma: no cover
            raise TypeError(f"unknown component {comp!r}")
    return "\n".join(lines) + "\n"


_ARITY = {"mode": 3, "source": 1, "bs": 3, "phase": 2, "cross": 2, "pdu": 6}


def parse_netlist(text: str) -> Netlist:
    """Parse the line-oriented netlist format."""
    declared: list[ModeDescriptor] = []
    components: list = []
    line_numbers: list[int] = []
    name = "netlist"
    encoding = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("name:"):
                name = body[len("name:"):].strip() or name
            elif body.startswith("encoding:"):
                encoding = _parse_encoding(body[len("encoding:"):], line_no)
            continue
        tokens = line.split("#", 1)[0].split()
        op, args = tokens[0].lower(), tokens[1:]
        if op not in _ARITY:
            raise NetlistSyntaxError(line_no, f"unknown directive {op!r}")
        if len(args) != _ARITY[op]:
            raise NetlistSyntaxError(line_no, f"{op} expects {_ARITY[op]} arguments, got {len(args)}")
        try:
            if op == "mode":
                band = Band.parse(args[2])
                if band is Band.RESIDUAL:
                    raise ValueError("Residual band is reserved for auto-allocated PDU residual modes")
                declared.append(ModeDescriptor(int(args[0]), args[1], band))
                continue
            if op == "source":
                comp = Source(int(args[0]))
            elif op == "bs":
                comp = BeamSplitter(int(args[0]), int(args[1]), float(args[2]))
            elif op == "phase":
                comp = Phase(int(args[0]), float(args[1]))
            elif op == "cross":
                comp = Crosser(int(args[0]), int(args[1]))
            else:
                etas = [float(a) for a in args[3:]]
                comp = Pdu(int(args[0]), int(args[1]), int(args[2]), PduParams(*etas))
        except ValueError as exc:
            raise NetlistSyntaxError(line_no, str(exc)) from None
        components.append(comp)
        line_numbers.append(line_no)

    for pos, mode in enumerate(declared):
        if mode.index != pos:
            raise NetlistSyntaxError(0, f"mode declarations must be contiguous from 0 in order; got {mode.index} at position {pos}")
    if not declared:
        raise NetlistSyntaxError(0, "no modes declared")
    return Netlist.assemble(declared, components, name=name, encoding=encoding, line_numbers=line_numbers)


def _parse_encoding(text: str, line_no: int) -> QubitPairs:
    pairs = []
    for item in text.split():
        parts = item.split(",")
        if len(parts) != 2:
            raise NetlistSyntaxError(line_no, f"encoding pair {item!r} must be '<rail0>,<rail1>'")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise NetlistSyntaxError(line_no, f"encoding pair {item!r} is not integer") from None
    return tuple(pairs)
