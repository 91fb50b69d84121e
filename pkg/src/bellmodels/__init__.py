"""Exact evaluation of hidden-variable models of Bell experiments."""
from .bellstats import (
    ChshReport,
    NoSignallingReport,
    Spreadsheet,
    chsh,
    chsh_of_coupling,
    no_signalling,
    spreadsheet_chsh,
)
from .kupczynski import (
    LabelledHiddenValue,
    Model1Spec,
    Model3Spec,
    PostSelectionReport,
    evaluate_model1,
    evaluate_model3,
    loophole_demo,
    posterior_given_detection,
    postselect,
    universal_construct,
)
from .lhv import (
    Coupling,
    DeterministicStrategy,
    LhvModel,
    coupling_of,
    enumerate_deterministic,
    predict,
    verify_chsh_bound,
)
from .mcsim import TrialRecord, compare, estimate, sample_trials
from .probcore import (
    Alphabet,
    CondFamily,
    JointDist,
    SettingsDist,
    compose,
    expectation_xy,
    factor,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "ChshReport", "CondFamily", "Coupling", "DeterministicStrategy", "JointDist",
    "LabelledHiddenValue", "LhvModel", "Model1Spec", "Model3Spec", "NoSignallingReport",
    "PostSelectionReport", "SettingsDist", "Spreadsheet", "TrialRecord", "chsh", "chsh_of_coupling",
    "compare", "compose", "coupling_of", "enumerate_deterministic", "estimate", "evaluate_model1",
    "evaluate_model3", "expectation_xy", "factor", "loophole_demo", "no_signalling",
    "posterior_given_detection", "postselect", "predict", "sample_trials", "spreadsheet_chsh",
    "universal_construct", "validate", "verify_chsh_bound",
]
