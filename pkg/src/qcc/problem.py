"""MaxCut instances and the QAOA compilation problems built from them."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .hardware import HardwareGraph, hardware_to_dict, qubit_key, resolve_hardware

# qstates used for the two utilization classes on each preset size
STATES_FOR = {8: {0.9: 7, 1.0: 8}, 21: {0.9: 18, 1.0: 21}, 40: {0.9: 36, 1.0: 40}}


class ProblemError(ValueError):
    pass


class SeededRNG:
    """PCG64 raw stream with our own bounded draws.

    numpy only guarantees the raw PCG64 output across releases, so integer
    ranges are derived here by rejection sampling on 64-bit words.
    """

    def __init__(self, seed: int):
        self._bits = np.random.PCG64(int(seed) & (2**64 - 1))

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (2**64 // n) * n
        while True:
            x = int(self._bits.random_raw())
            if x < limit:
                return x % n

    def shuffle(self, items: list) -> list:
        # Fisher-Yates
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def sample(self, items: list, k: int) -> list:
        pool = list(items)
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def random(self) -> float:
        return (int(self._bits.random_raw()) >> 11) * (1.0 / 2**53)


def qstate_name(q: int) -> str:
    return f"q{q + 1}"


def norm_pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class MaxCutInstance:
    n_states: int
    edges: frozenset[tuple[int, int]]
    seed: int = 0
    utilization: float = 1.0

    def __post_init__(self):
        if self.n_states < 1:
            raise ProblemError("n_states must be positive")
        edges = set()
        for a, b in self.edges:
            if a == b:
                raise ProblemError(f"self-loop on qstate {a}")
            if not (0 <= a < self.n_states and 0 <= b < self.n_states):
                raise ProblemError(f"edge ({a},{b}) outside 0..{self.n_states - 1}")
            pair = norm_pair(a, b)
            if pair in edges:
                raise ProblemError(f"duplicate edge {pair}")
            edges.add(pair)
        object.__setattr__(self, "edges", frozenset(edges))

    @property
    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    @property
    def used_states(self) -> frozenset[int]:
        return frozenset(q for e in self.edges for q in e)


def generate_instance(n_qubits: int, utilization: float, seed: int) -> MaxCutInstance:
    """Random G(n, M) graph with M = n_qubits edges over the utilized qstates."""
    try:
        n_states = STATES_FOR[n_qubits][utilization]
    except KeyError:
        raise ProblemError(
            f"no benchmark class for n_qubits={n_qubits}, utilization={utilization}"
        ) from None
    return random_instance(n_states, n_qubits, seed, utilization)


def random_instance(n_states: int, n_edges: int, seed: int, utilization: float = 1.0) -> MaxCutInstance:
    pairs = list(combinations(range(n_states), 2))
    if n_edges > len(pairs):
        raise ProblemError(f"{n_edges} edges requested but only {len(pairs)} pairs over {n_states} qstates")
    chosen = SeededRNG(seed).sample(pairs, n_edges)
    return MaxCutInstance(n_states, frozenset(chosen), seed, utilization)


def six_vertex_instance() -> MaxCutInstance:
    """Six-vertex example graph on qstates q1..q8; q2 and q8 carry no edges."""
    named = [(1, 4), (1, 3), (1, 5), (5, 6), (3, 7), (6, 7)]
    return MaxCutInstance(8, frozenset((a - 1, b - 1) for a, b in named))


@dataclass(frozen=True)
class PSGoal:
    level: int
    pair: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "pair", norm_pair(*self.pair))


@dataclass(frozen=True, eq=False)
class CompilationProblem:
    """A MaxCut instance placed on hardware, compiled for ``p`` QAOA levels.

    ``initial`` maps every real qstate to a qubit. Qubits left over are filled
    with idle qstates numbered ``n_states, n_states+1, ...`` in canonical qubit
    order, so every qubit always holds exactly one qstate.
    """

    hardware: HardwareGraph
    instance: MaxCutInstance
    p: int
    initial: Mapping[int, str]
    assignment: str = field(default="identity", compare=False)
    seed: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.p < 1:
            raise ProblemError("p must be >= 1")
        n = self.instance.n_states
        if n > len(self.hardware.qubits):
            raise ProblemError(f"{n} qstates do not fit on {len(self.hardware.qubits)} qubits")
        initial = {int(q): v for q, v in self.initial.items()}
        if set(initial) != set(range(n)):
            raise ProblemError("initial assignment must cover exactly qstates 0..n_states-1")
        for q, v in initial.items():
            if v not in self.hardware.index:
                raise ProblemError(f"qstate {qstate_name(q)} placed on unknown qubit {v!r}")
        if len(set(initial.values())) != n:
            raise ProblemError("initial assignment is not injective")
        object.__setattr__(self, "initial", initial)

    def __eq__(self, other):
        if not isinstance(other, CompilationProblem):
            return NotImplemented
        return (self.hardware, self.instance, self.p, self.initial) == (
            other.hardware, other.instance, other.p, other.initial)

    def __hash__(self):
        return hash((self.instance, self.p))

    @property
    def n_total(self) -> int:
        return len(self.hardware.qubits)

    @cached_property
    def placement(self) -> tuple[str, ...]:
        """Qubit of every qstate, idle fillers included."""
        taken = set(self.initial.values())
        free = [q for q in self.hardware.qubits if q not in taken]
        return tuple(self.initial[q] for q in range(self.instance.n_states)) + tuple(free)

    @cached_property
    def used(self) -> frozenset[int]:
        return self.instance.used_states

    @cached_property
    def goals(self) -> tuple[PSGoal, ...]:
        return tuple(PSGoal(level, pair) for level in range(1, self.p + 1)
                     for pair in self.instance.sorted_edges)

    @cached_property
    def partners(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for a, b in self.instance.sorted_edges:
            out.setdefault(a, []).append(b)
            out.setdefault(b, []).append(a)
        return {q: tuple(v) for q, v in out.items()}

    def mix_levels(self) -> range:
        return range(1, self.p)

    def with_p(self, p: int) -> "CompilationProblem":
        return CompilationProblem(self.hardware, self.instance, p, self.initial, self.assignment, self.seed)


def build_problem(instance: MaxCutInstance, hardware: HardwareGraph, p: int = 1,
                  assignment: str = "identity", seed: int = 0) -> CompilationProblem:
    qubits = list(hardware.qubits)
    n = instance.n_states
    if n > len(qubits):
        raise ProblemError(f"{n} qstates do not fit on {len(qubits)} qubits")
    if assignment == "identity":
        chosen = qubits[:n]
    elif assignment == "random":
        chosen = SeededRNG(seed).sample(qubits, n)
    else:
        raise ProblemError(f"unknown assignment mode {assignment!r}")
    return CompilationProblem(hardware, instance, p, dict(enumerate(chosen)), assignment, seed)


def goal_set(problem: CompilationProblem, level: int) -> set[PSGoal]:
    if not 1 <= level <= problem.p:
        raise ProblemError(f"level {level} outside 1..{problem.p}")
    return {PSGoal(level, pair) for pair in problem.instance.edges}


# -- problem file -------------------------------------------------------------

def problem_to_dict(problem: CompilationProblem, hardware_ref: str | None = None) -> dict:
    inst = problem.instance
    return {
        "hardware": hardware_ref if hardware_ref is not None else hardware_to_dict(problem.hardware),
        "n_states": inst.n_states,
        "edges": [list(e) for e in inst.sorted_edges],
        "p": problem.p,
        "initial": {qstate_name(q): problem.initial[q] for q in range(inst.n_states)},
        "seed": inst.seed,
        "utilization": inst.utilization,
    }


def problem_from_dict(data: Mapping, base_dir: str | None = None) -> CompilationProblem:
    import os

    try:
        ref = data["hardware"]
        if isinstance(ref, str) and base_dir and not os.path.isabs(ref) and os.path.exists(os.path.join(base_dir, ref)):
            ref = os.path.join(base_dir, ref)
        hardware = resolve_hardware(ref)
        inst = MaxCutInstance(
            int(data["n_states"]),
            frozenset(tuple(e) for e in data["edges"]),
            int(data.get("seed", 0)),
            float(data.get("utilization", 1.0)),
        )
        initial = {}
        for key, qubit in data["initial"].items():
            idx = int(key[1:]) - 1 if isinstance(key, str) and key.startswith("q") else int(key)
            initial[idx] = qubit
        return CompilationProblem(hardware, inst, int(data["p"]), initial)
    except (KeyError, TypeError) as exc:
        raise ProblemError(f"malformed problem file: {exc}") from None


def save_problem(problem: CompilationProblem, hardware_ref: str | None = None) -> str:
    text = json.dumps(problem_to_dict(problem, hardware_ref), indent=1)
    # one edge pair per line
    return re.sub(r"\[\s+(\d+),\s+(\d+)\s+\]", r"[\1, \2]", text) + "\n"


def load_problem(path: str) -> CompilationProblem:
    import os

    with open(path, encoding="utf-8") as fh:
        return problem_from_dict(json.load(fh), base_dir=os.path.dirname(os.path.abspath(path)))


def sorted_qubits(qs: Iterable[str]) -> list[str]:
    return sorted(qs, key=qubit_key)
