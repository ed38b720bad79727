from src.exceptions import NumericalError


K_MISMATCH = "Parameter vector has %s harmonics but the signal has %s sinusoids."
TOO_FEW_SAMPLES = "At least 2K+1 = %s samples are needed, got %s."
EMPTY_WINDOW = "Search window [%s, %s] is empty."
DEGENERATE_GRAM = "Harmonic atom Gram matrix at omega=%s is near-singular (condition %.3e)."
REFINE_NOT_CONVERGED = "Refinement of omega did not converge after %s evaluations; keeping the best point %s."
SOLVED = "Pseudo-true fundamental %.12f (residual energy %.6e, %s iterations)."
PSEUDO_BELOW_TRUE = "Pseudo-true variance %s is below the true noise variance %s."


class DegenerateGramError(NumericalError):
    pass
