"""Random cell-mapped netlists over the demo library for property tests."""

import numpy as np

from fmrforge import GateInstance, Netlist


def random_netlist(lib, rng: np.random.Generator, max_nm: int = 12, n: int | None = None, two_outputs=None):
    cells = sorted(lib.cells)
    if n is None:
        n = int(rng.integers(2, 7))
    budget = max_nm - n  # allowed internal nodes
    n_out = 2 if (two_outputs if two_outputs is not None else rng.random() < 0.25) else 1
    n_gates = int(rng.integers(1, budget + n_out + 1))
    n_out = min(n_out, n_gates)
    inputs = [f"x{i}" for i in range(n)]
    nets = list(inputs)
    gates = []
    for i in range(n_gates):
        cell = lib[cells[int(rng.integers(len(cells)))]]
        # bias towards recent nets so the DAG gets some depth
        weights = np.linspace(1.0, 3.0, len(nets))
        weights /= weights.sum()
        ins = tuple(nets[int(j)] for j in rng.choice(len(nets), size=cell.arity, p=weights))
        out = f"n{i}"
        gates.append(GateInstance(f"g{i:02d}", cell.name, ins, out))
        nets.append(out)
    outs = [gates[-1].output_net]
    if n_out == 2:
        others = [g.output_net for g in gates[:-1]]
        outs.append(others[int(rng.integers(len(others)))])
    order = rng.permutation(len(gates))
    return Netlist(
        name="rand", inputs=tuple(inputs), outputs=tuple(outs),
        gates=tuple(gates[i] for i in order), cells=dict(lib.cells),
    )
