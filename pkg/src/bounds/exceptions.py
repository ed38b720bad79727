from src.exceptions import NumericalError


DEGENERATE_DENOMINATOR = "Asymptotic bound denominator C-E+Z+D = %s is degenerate."
COLLAPSED_AMPLITUDE = "Arrowhead diagonal entry %s is %s; an amplitude has collapsed."
TOO_FEW_SAMPLES = "The unstructured bound needs N >= 3K = %s samples, got %s."
COINCIDING_FREQUENCIES = "Unstructured Fisher information is singular; check for coinciding frequencies."
SANDWICH_CONDITION = "Sandwich matrix A has condition estimate %.3e."
UNKNOWN_UNSTRUCTURED = "Unknown unstructured bound variant %s."
LAW_REQUIRED = "Provide either beta or offsets, not both."
NOISE_REQUIRED = "Provide exactly one of snr_db or sigma2."
PROFILE_LENGTH = "%s has %s entries, expected K = %s."
BOUND_FAILED = "Bound computation failed: %s"


class DegenerateBoundError(NumericalError):
    pass
