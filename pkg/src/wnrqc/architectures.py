"""Circuit diagrams: ordered sequences of qudit pairs.

A diagram fixes *where* two-qudit gates act, not which unitaries fill them.
Provided generators: brickwork ring (1D, periodic), uniformly random pairs
(complete graph), and brickwork over a periodic lattice of any dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

_KINDS = ("ring1d", "complete_graph", "lattice", "custom")


@dataclass(frozen=True)
class CircuitDiagram:
    n: int
    gates: np.ndarray  # shape (s, 2), int32, entries in [0, n)
    kind: str = "custom"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        gates = np.ascontiguousarray(np.asarray(self.gates, dtype=np.int32).reshape(-1, 2))
        object.__setattr__(self, "gates", gates)
        if self.n < 1:
            raise ParameterError(f"n={self.n} must be >= 1")
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown diagram kind {self.kind!r}")
        if gates.size:
            if gates.min() < 0 or gates.max() >= self.n:
                raise ParameterError("gate index out of range")
            if (gates[:, 0] == gates[:, 1]).any():
                raise ParameterError("gate pair with identical qudits")

    @property
    def s(self) -> int:
        return len(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(map(tuple, self.gates))


def gen_ring1d(n: int, depth: int) -> CircuitDiagram:
    """Brickwork ring: layer 1 pairs (0,1),(2,3),...; layer 2 pairs
    (1,2),(3,4),...,(n-1,0); repeating.  n must be even and >= 4."""
    if n % 2 != 0 or n < 4:
        raise ParameterError(f"ring1d requires even n >= 4, got n={n}")
    if depth < 0:
        raise ParameterError(f"depth={depth} must be >= 0")
    gates = []
    for d in range(depth):
        off = d % 2
        for k in range(n // 2):
            gates.append((2 * k + off, (2 * k + 1 + off) % n))
    return CircuitDiagram(n=n, gates=np.array(gates, dtype=np.int32).reshape(-1, 2), kind="ring1d")


def gen_complete_graph(n: int, s: int, seed) -> CircuitDiagram:
    """s independent pairs, each uniform over all n(n-1)/2 pairs."""
    if n < 2:
        raise ParameterError(f"complete_graph requires n >= 2, got n={n}")
    rng = np.random.default_rng(seed)
    i, j = sample_pairs(n, s, rng)
    gates = np.stack([np.minimum(i, j), np.maximum(i, j)], axis=1).astype(np.int32)
    return CircuitDiagram(n=n, gates=gates, kind="complete_graph", meta={"seed": seed})


def sample_pairs(n: int, s: int, rng: np.random.Generator):
    """Draw s uniform unordered pairs as index arrays (i, j), i != j."""
    i = rng.integers(0, n, size=s)
    j = rng.integers(0, n - 1, size=s)
    j = j + (j >= i)
    return i, j


def gen_lattice(dims: list[int], depth: int) -> CircuitDiagram:
    """Brickwork over a periodic lattice.

    Layer l couples along axis (l mod D) with parity (l // D) mod 2:
    even parity pairs sites (2m, 2m+1) along the axis, odd parity pairs
    (2m+1, 2m+2 mod L).  Axis-major/even-first ordering is a convention;
    gate contents are Haar-averaged so only the pairing structure matters.
    """
    dims = [int(d) for d in dims]
    if not dims:
        raise ParameterError("lattice requires at least one dimension")
    for d in dims:
        if d % 2 != 0 or d < 2:
            raise ParameterError(f"lattice dims must be even and >= 2, got {dims}")
    if depth < 0:
        raise ParameterError(f"depth={depth} must be >= 0")
    ndim = len(dims)
    n = int(np.prod(dims))
    strides = np.ones(ndim, dtype=np.int64)
    for a in range(ndim - 2, -1, -1):
        strides[a] = strides[a + 1] * dims[a + 1]

    gates = []
    for layer in range(depth):
        axis = layer % ndim
        parity = (layer // ndim) % 2
        length = dims[axis]
        other_dims = [dims[a] for a in range(ndim) if a != axis]
        other_axes = [a for a in range(ndim) if a != axis]
        for other in np.ndindex(*other_dims) if other_dims else [()]:
            base = sum(other[k] * strides[other_axes[k]] for k in range(len(other_axes)))
            for m in range(length // 2):
                x = (2 * m + parity) % length
                y = (2 * m + 1 + parity) % length
                gates.append((base + x * strides[axis], base + y * strides[axis]))
    return CircuitDiagram(
        n=n, gates=np.array(gates, dtype=np.int32).reshape(-1, 2), kind="lattice",
        meta={"dims": dims},
    )


def is_layered(diagram: CircuitDiagram) -> bool:
    """True iff gates split into consecutive blocks of n/2 in which every
    qudit appears exactly once (requires even n and s a multiple of n/2)."""
    n = diagram.n
    if n % 2 != 0:
        return False
    block = n // 2
    if diagram.s % block != 0:
        return False
    for b in range(diagram.s // block):
        seen = diagram.gates[b * block:(b + 1) * block].ravel()
        if len(np.unique(seen)) != n:
            return False
    return True


def save_diagram(diagram: CircuitDiagram, path) -> None:
    """Line-oriented text format: header 'n s kind', then one 'i j' per line."""
    with open(path, "w", encoding="ascii") as f:
        f.write(f"{diagram.n} {diagram.s} {diagram.kind}\n")
        for i, j in diagram.gates:
            f.write(f"{i} {j}\n")


def load_diagram(path) -> CircuitDiagram:
    with open(path, encoding="ascii") as f:
        header = f.readline().split()
        if len(header) != 3:
            raise ParameterError(f"bad diagram header in {path}")
        n, s, kind = int(header[0]), int(header[1]), header[2]
        gates = np.loadtxt(f, dtype=np.int32, ndmin=2)
    if gates.size == 0:
        gates = np.empty((0, 2), dtype=np.int32)
    if len(gates) != s:
        raise ParameterError(f"diagram header declares s={s} but file has {len(gates)} gates")
    return CircuitDiagram(n=n, gates=gates, kind=kind)
