"""Exact and sampled boson transition amplitudes, matrix permanents and the
universal bound ``|<s|U|t>| <= min(v_s/v_t, v_t/v_s)``."""

__version__ = "0.1.0"

from .errors import BosonBoundError, DomainError, SizeError, UnsupportedError, ValidationError
from .fockspace import (BoundValue, Limits, OccupationVector, p_max_add_one, p_max_collision,
                        p_max_hom_merge, p_max_single_mode, transition_bound, v_factor)
from .permanent import permanent, permanent_glynn, permanent_naive, permanent_ryser
from .optics import (BeamSplitter, PhaseShifter, Scenario, UnitaryMatrix, beamsplitter_unitary,
                     compose_network, haar_random_unitary, scenario_add_one, scenario_hom_merge)
from .amplitude import (AmplitudeResult, FockSubmatrix, amplitude_exact, amplitude_theorem1,
                        build_submatrix, raw_g)
from .estimator import (EstimatorPlan, SamplingDomain, convergence_study, estimate_amplitude,
                        estimate_permanent_repeated, make_plan, mgen_gly, plan_samples)
