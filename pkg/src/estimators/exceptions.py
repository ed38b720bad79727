INIT_LENGTH = "Expected %s initial frequencies, got %s."
INIT_NOT_DISTINCT = "Initial frequencies must be distinct, got %s."
FREQUENCY_COLLISION = "Frequencies %s and %s collided (spacing %.3e below %.3e)."
NOT_CONVERGED = "Coordinate descent stopped after %s sweeps with relative change %.3e."
CONSISTENCY_ROW = "N=%s: mean omega %.10f, pseudo-true %.10f, gap %.3e (stderr %.3e)."
NO_CONVERGED = "N=%s: none of %s trials converged."
