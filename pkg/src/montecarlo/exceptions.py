NEGATIVE_BETA = "Stiffness values on the beta axis must be nonnegative, got %s."
TOO_FEW_SAMPLES = "Sample counts on the samples axis must be at least 3K = %s, got %s."
NO_CONVERGED_TRIALS = "No converged trials at %s = %s; statistics are undefined."
BOUNDS_FAILED = "Bounds failed at %s = %s: %s"
AXIS_DONE = "%s = %s: %s/%s trials converged, MSE %.3e, MCRLB %.3e."
SWEEP_DONE = "Sweep over %s finished: %s axis values, %s failures."
TRIAL_FAILED = "%s estimator failed on trial %s at %s = %s: %s"
