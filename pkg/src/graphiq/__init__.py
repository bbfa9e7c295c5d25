"""Distance-based quantum classification of facial-landmark graphs."""

from ._kernels import KERNEL
from .classifier import (
    ClassificationOutcome,
    Decision,
    TrainingSet,
    build_classifier_circuit,
    classify_classical,
    classify_quantum,
    closed_form_probability,
    exact_class_probability,
    frobenius_distance,
)
from .delaunay import DegenerateInputError, DuplicatePointError, triangulate
from .encoding import AmplitudeVector, CircuitFragment, EncodingError, encode, multiplexed_rotation, synthesize_state_prep
from .experiments import ExperimentConfig, ExperimentReport, run_experiment
from .graphs import AdjacencyVector, WeightedGraph, adjacency_vector, complete_graph, delaunay_graph, edge_index
from .landmarks import (
    Expression,
    LandmarkParseError,
    PointCloud,
    extract_mouth,
    load_landmarks,
    select_vertices,
    synthesize_face,
    write_landmarks,
)
from .simulator import Circuit, Gate, PostSelectionError, Statevector, apply_gate, collapse, probability, run, sample

__version__ = "0.1.0"
