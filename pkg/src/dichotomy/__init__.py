"""Proof by dichotomy over residue classes modulo powers of two."""

from .engine import (
    Decision,
    ProofTrace,
    ProverError,
    StepRecord,
    Termination,
    TerminationKind,
    TraceClassification,
    Verdict,
    candidate_from_trace,
    classify_trace,
    density,
    run_dichotomy,
    run_finite,
)
from .props import (
    AffineMap,
    ClassVerdict,
    Proposition,
    Truth,
    TruthKind,
    exact_prover,
    multi_hole,
    parse_proposition,
    periodic,
    pull_back,
    scripted_prover,
    single_hole,
)
from .residue import NATURALS, ResidueClass, enumerate_class, membership, split

__version__ = "0.1.0"
