"""Mach-Zehnder multiphoton coincidence simulator and classical visibility bound."""

__version__ = "0.1.0"

from .bound import ClassicalBoundValue, Verdict, bound_table, classical_bound, classify, verify_bound_random
from .coincidence import (
    CoincidencePattern,
    CoincidenceScan,
    PhaseGrid,
    coherent_pair_analytic,
    coherent_vacuum_analytic,
    coincidence_trace,
    mixture_scan,
    scan,
)
from .detector import DetectorModel, ideal_detector, imperfect_detector, joint_response
from .fock import BlockBasis, BlockUnitary, apply, beam_splitter, full_mzi, half_mzi, phase_shifter
from .montecarlo import ShotConfig, sample_full_experiment, sample_scan
from .states import (
    ClassicalMixture,
    TwoModeState,
    coherent_product,
    fock_pair,
    noon_state,
    random_classical_mixture,
)
from .visibility import (
    FourierSeries,
    VisibilityEstimate,
    bootstrap_uncertainty,
    fit_fourier,
    n_fold_visibility,
    shift_superimpose,
)
