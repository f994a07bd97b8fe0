"""Hardware architectures as duration-weighted, labeled qubit multigraphs."""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from importlib import resources
from typing import Iterable, Mapping


class GateKind(str, Enum):
    SWAP = "swap"
    PS = "ps"
    MIX = "mix"

    @property
    def arity(self) -> int:
        return 1 if self is GateKind.MIX else 2


class HardwareError(ValueError):
    pass


class HardwareParseError(HardwareError):
    pass


class HardwareValidationError(HardwareError):
    pass


_NUM = re.compile(r"(\d+)")


def qubit_key(q: str) -> tuple:
    """Natural sort key, so that n2 < n10."""
    return tuple(int(t) if t.isdigit() else t for t in _NUM.split(q))


def pair_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if qubit_key(a) <= qubit_key(b) else (b, a)


@dataclass(frozen=True)
class EdgeGate:
    a: str
    b: str
    kind: GateKind
    duration: int

    def __post_init__(self):
        if self.a == self.b:
            raise HardwareValidationError(f"self-loop gate on {self.a}")
        if self.kind is GateKind.MIX:
            raise HardwareValidationError("mix gates are per-qubit, not edge gates")
        if not isinstance(self.duration, int) or self.duration < 1:
            raise HardwareValidationError(
                f"non-positive duration {self.duration!r} on {self.kind.value}({self.a},{self.b})"
            )
        a, b = pair_key(self.a, self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.a, self.b)


@dataclass(frozen=True, eq=False)
class HardwareGraph:
    """Qubits plus SWAP/PS edge gates and per-qubit MIX durations.

    Immutable after construction. Equality compares the canonical content
    (qubit set, gate set, mix durations), not declaration order.
    """

    qubits: tuple[str, ...]
    edges: tuple[EdgeGate, ...]
    mix_duration: Mapping[str, int]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        qubits = tuple(sorted(dict.fromkeys(self.qubits), key=qubit_key))
        if len(qubits) != len(self.qubits):
            raise HardwareValidationError("duplicate qubit id")
        if not qubits:
            raise HardwareValidationError("hardware has no qubits")
        declared = set(qubits)
        seen = set()
        for e in self.edges:
            for q in (e.a, e.b):
                if q not in declared:
                    raise HardwareValidationError(f"unknown qubit {q!r} in {e.kind.value} gate")
            key = (e.a, e.b, e.kind)
            if key in seen:
                raise HardwareValidationError(f"duplicate {e.kind.value} gate on ({e.a},{e.b})")
            seen.add(key)
        if isinstance(self.mix_duration, int):
            mix = {q: self.mix_duration for q in qubits}
        else:
            mix = dict(self.mix_duration)
            missing = declared - set(mix)
            if missing:
                raise HardwareValidationError(f"no mix duration for {sorted(missing, key=qubit_key)}")
            extra = set(mix) - declared
            if extra:
                raise HardwareValidationError(f"unknown qubit {sorted(extra, key=qubit_key)[0]!r} in mix_duration")
        for q, d in mix.items():
            if not isinstance(d, int) or d < 1:
                raise HardwareValidationError(f"non-positive mix duration {d!r} on {q}")
        edges = tuple(sorted(self.edges, key=lambda e: (qubit_key(e.a), qubit_key(e.b), e.kind.value)))
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "mix_duration", mix)
        self._check_connected()

    def _check_connected(self):
        adj = self._adjacency[GateKind.SWAP]
        start = self.qubits[0]
        seen = {start}
        todo = [start]
        while todo:
            for r in adj[todo.pop()]:
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        if len(seen) != len(self.qubits):
            raise HardwareValidationError("SWAP subgraph is disconnected")

    def __eq__(self, other):
        if not isinstance(other, HardwareGraph):
            return NotImplemented
        return (self.qubits, self.edges, self.mix_duration) == (other.qubits, other.edges, other.mix_duration)

    def __hash__(self):
        return hash((self.qubits, self.edges))

    def __len__(self):
        return len(self.qubits)

    @cached_property
    def _adjacency(self) -> dict[GateKind, dict[str, tuple[str, ...]]]:
        adj = {k: {q: [] for q in self.qubits} for k in (GateKind.SWAP, GateKind.PS)}
        for e in self.edges:
            adj[e.kind][e.a].append(e.b)
            adj[e.kind][e.b].append(e.a)
        return {k: {q: tuple(sorted(v, key=qubit_key)) for q, v in m.items()} for k, m in adj.items()}

    @cached_property
    def _durations(self) -> dict[tuple[str, str, GateKind], int]:
        return {(e.a, e.b, e.kind): e.duration for e in self.edges}

    @cached_property
    def index(self) -> dict[str, int]:
        return {q: i for i, q in enumerate(self.qubits)}

    def gate_duration(self, kind: GateKind, qubits: Iterable[str]) -> int | None:
        """Duration of the gate of ``kind`` on ``qubits``, None if absent."""
        qs = tuple(qubits)
        if kind is GateKind.MIX:
            return self.mix_duration.get(qs[0]) if len(qs) == 1 else None
        if len(qs) != 2:
            return None
        return self._durations.get((*pair_key(*qs), kind))

    def gates(self, kind: GateKind) -> list[EdgeGate]:
        return [e for e in self.edges if e.kind is kind]

    @cached_property
    def swap_distances(self) -> dict[str, dict[str, int]]:
        return {q: self._bfs(q) for q in self.qubits}

    def _bfs(self, src: str) -> dict[str, int]:
        adj = self._adjacency[GateKind.SWAP]
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    @cached_property
    def min_swap_duration(self) -> int:
        return min(e.duration for e in self.gates(GateKind.SWAP)) if self.gates(GateKind.SWAP) else 0

    @cached_property
    def min_ps_duration(self) -> int:
        return min((e.duration for e in self.gates(GateKind.PS)), default=0)

    @cached_property
    def min_mix_duration(self) -> int:
        return min(self.mix_duration.values())


def neighbors(g: HardwareGraph, q: str, kind: GateKind) -> set[str]:
    if q not in g.index:
        raise HardwareValidationError(f"unknown qubit {q!r}")
    if kind is GateKind.MIX:
        raise ValueError("MIX gates have no neighbors")
    return set(g._adjacency[kind][q])


def swap_distance(g: HardwareGraph, src: str, dst: str) -> tuple[int, list[str]]:
    """Shortest SWAP path from ``src`` to ``dst``.

    Among equally short paths the lexicographically smallest qubit sequence
    (natural order) is returned.
    """
    for q in (src, dst):
        if q not in g.index:
            raise HardwareValidationError(f"unknown qubit {q!r}")
    to_dst = g.swap_distances[dst]
    adj = g._adjacency[GateKind.SWAP]
    path = [src]
    while path[-1] != dst:
        here = path[-1]
        path.append(next(r for r in adj[here] if to_dst[r] == to_dst[here] - 1))
    return len(path) - 1, path


# -- file format ------------------------------------------------------------

def hardware_to_dict(g: HardwareGraph) -> dict:
    by_pair: dict[tuple[str, str], list[dict]] = {}
    for e in g.edges:
        by_pair.setdefault(e.pair, []).append({"kind": e.kind.value, "duration": e.duration})
    mix_values = set(g.mix_duration.values())
    mix = mix_values.pop() if len(mix_values) == 1 else {q: g.mix_duration[q] for q in g.qubits}
    out = {
        "qubits": list(g.qubits),
        "edges": [{"a": a, "b": b, "gates": gates} for (a, b), gates in by_pair.items()],
        "mix_duration": mix,
    }
    if g.name:
        out["name"] = g.name
    return out


def save_hardware(g: HardwareGraph) -> str:
    return json.dumps(hardware_to_dict(g), indent=1) + "\n"


def hardware_from_dict(data: Mapping) -> HardwareGraph:
    if not isinstance(data, Mapping):
        raise HardwareParseError("hardware spec must be a JSON object")
    try:
        qubits = data["qubits"]
        raw_edges = data.get("edges", [])
        mix = data.get("mix_duration", 1)
    except KeyError as exc:
        raise HardwareParseError(f"missing key {exc}") from None
    if not isinstance(qubits, list) or not all(isinstance(q, str) for q in qubits):
        raise HardwareParseError("'qubits' must be an array of strings")
    if not isinstance(raw_edges, list):
        raise HardwareParseError("'edges' must be an array")
    edges = []
    for item in raw_edges:
        try:
            a, b, gates = item["a"], item["b"], item["gates"]
            for gate in gates:
                kind = GateKind(gate["kind"])
                if kind is GateKind.MIX:
                    raise HardwareParseError("edge gate kind must be 'swap' or 'ps'")
                edges.append(EdgeGate(a, b, kind, gate["duration"]))
        except (KeyError, TypeError) as exc:
            raise HardwareParseError(f"malformed edge entry {item!r}: {exc}") from None
        except ValueError as exc:
            if isinstance(exc, HardwareError):
                raise
            raise HardwareParseError(f"malformed edge entry {item!r}: {exc}") from None
    if not isinstance(mix, (int, dict)):
        raise HardwareParseError("'mix_duration' must be an integer or an object")
    return HardwareGraph(tuple(qubits), tuple(edges), mix, name=data.get("name", ""))


def load_hardware(spec_text: str) -> HardwareGraph:
    try:
        data = json.loads(spec_text)
    except json.JSONDecodeError as exc:
        raise HardwareParseError(f"invalid JSON: {exc}") from None
    return hardware_from_dict(data)


# -- presets ------------------------------------------------------------------

PRESETS = {"N8": 1, "N21": 2, "N40": 3}

# clockwise around the first octagon, starting top-left
_N8_RING = ((0, 0, "n1"), (1, 0, "n4"), (2, 0, "n5"), (2, 1, "n6"),
            (2, 2, "n7"), (1, 2, "n8"), (0, 2, "n3"), (0, 1, "n2"))


def _lattice_names(k: int) -> dict[tuple[int, int], str]:
    size = 2 * k + 1
    names = {(x, y): n for x, y, n in _N8_RING}
    counter = 9
    for y in range(size):
        for x in range(size):
            if (x % 2 and y % 2) or (x, y) in names:
                continue
            names[(x, y)] = f"n{counter}"
            counter += 1
    return names


def octagon_lattice(k: int, swap_duration: int = 2, mix_duration: int = 1) -> HardwareGraph:
    """k-by-k lattice of 8-qubit rings, neighbouring rings sharing a side.

    Qubits sit on a (2k+1)x(2k+1) grid with the ring centres removed, which
    gives 8, 21 and 40 qubits for k = 1, 2, 3. The top-left ring carries the
    labels n1..n8; the remaining sites are numbered row-major. PS durations
    alternate 3/4 around every ring.
    """
    names = _lattice_names(k)
    edges = []
    for (x, y), a in names.items():
        for dx, dy in ((1, 0), (0, 1)):
            b = names.get((x + dx, y + dy))
            if b is None:
                continue
            if dy == 0:
                slow = (x + y // 2) % 2 == 0
            else:
                slow = (y + x // 2) % 2 == 1
            edges.append(EdgeGate(a, b, GateKind.SWAP, swap_duration))
            edges.append(EdgeGate(a, b, GateKind.PS, 4 if slow else 3))
    return HardwareGraph(tuple(names.values()), tuple(edges), mix_duration, name=f"N{len(names)}")


def preset_coordinates(name: str) -> dict[str, tuple[int, int]]:
    """Grid position of every qubit of a preset (for drawing)."""
    return {n: site for site, n in _lattice_names(PRESETS[name]).items()}


def preset(name: str) -> HardwareGraph:
    if name not in PRESETS:
        raise HardwareError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")
    text = resources.files("qcc.data").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return load_hardware(text)


def resolve_hardware(ref: str | Mapping | HardwareGraph) -> HardwareGraph:
    """Accept a preset name, a path to a hardware file, or an inline dict."""
    if isinstance(ref, HardwareGraph):
        return ref
    if isinstance(ref, Mapping):
        return hardware_from_dict(ref)
    if ref in PRESETS:
        return preset(ref)
    with open(ref, encoding="utf-8") as fh:
        return load_hardware(fh.read())
