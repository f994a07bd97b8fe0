"""Regenerate the shipped N8/N21/N40 hardware files from the octagon lattice."""

from pathlib import Path

from qcc.hardware import PRESETS, octagon_lattice, save_hardware

OUT = Path(__file__).resolve().parents[1] / "src" / "qcc" / "data"

if __name__ == "__main__":
    for name, k in PRESETS.items():
        g = octagon_lattice(k)
        (OUT / f"{name}.json").write_text(save_hardware(g), encoding="utf-8")
        print(f"{name}: {len(g.qubits)} qubits, {len(g.edges) // 2} edges")
