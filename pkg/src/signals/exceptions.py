LENGTH_MISMATCH = "amplitudes, phases and frequencies must have equal length, got %s, %s and %s."
NON_POSITIVE_AMPLITUDE = "Amplitudes must be positive, got %s at order %s."
FREQUENCY_RANGE = "Frequencies must lie in [0, 2pi), got %s at order %s."
FREQUENCY_ORDER = "Frequencies must be strictly increasing, order %s (%s) does not exceed order %s (%s)."
OFFSETS_LENGTH = "Offset law defines %s offsets but %s sinusoids were requested."
ALIASING = "Sinusoid of order %s aliases: frequency %s is not below 2pi."
HARMONIC_ALIASING = "Fundamental %s times %s harmonics is not below 2pi."
INVALID_SAMPLES = "Sample count must be at least 1, got %s."


class AliasingError(ValueError):
    def __init__(self, order: int, frequency: float) -> None:
        super().__init__(ALIASING % (order, frequency))
        self.order = order
        self.frequency = frequency
