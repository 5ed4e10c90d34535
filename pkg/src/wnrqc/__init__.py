"""Second-moment walk engines and white-noise error bounds for noisy random
quantum circuits."""

from .architectures import (CircuitDiagram, gen_complete_graph, gen_lattice,
                            gen_ring1d, is_layered, load_diagram, save_diagram)
from .errors import (CapacityError, DegenerateInputError, ParameterError,
                     SchemaError)
from .kernels import BACKEND as KERNEL_BACKEND
from .metrics import (BoundReport, ZTriple, bounds_from_ztriple,
                      fidelity_decay_check, threshold_scan, toy_model_ztriple)
from .noise import (NoiseChannel, NoiseDerived, channel_from_spec,
                    make_custom, make_depolarizing, make_dephasing,
                    make_rotation)

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "CapacityError", "CircuitDiagram", "DegenerateInputError",
    "KERNEL_BACKEND", "NoiseChannel", "NoiseDerived", "ParameterError",
    "SchemaError", "ZTriple", "bounds_from_ztriple", "channel_from_spec",
    "fidelity_decay_check", "gen_complete_graph", "gen_lattice", "gen_ring1d",
    "is_layered", "load_diagram", "make_custom", "make_depolarizing",
    "make_dephasing", "make_rotation", "save_diagram", "threshold_scan",
    "toy_model_ztriple",
]
