from src.exceptions import InharmonicaError


MULTICHANNEL = "Expected a mono WAV file, got %s channels in %s."
UNSUPPORTED_FORMAT = "Unsupported WAV sample format %s in %s; use 16-bit PCM or 32-bit float."
NO_ACCEPTED_FRAMES = "No accepted frames out of %s analysed (rejections: %s)."
SILENT_FRAME = "silent frame"
NO_PEAKS = "no spectral peaks above threshold"
TOO_FEW_COMPONENTS = "fewer than %s components (%s detected)"
TOO_MANY_COMPONENTS = "more than %s components (%s detected)"
MISSING_HARMONICS = "missing harmonics (orders %s)"
REFINEMENT_FAILED = "sinusoidal refinement failed: %s"
BOUNDS_FAILED = "bounds failed: %s"
FRAMES_ANALYSED = "Analysed %s frames, %s accepted."


class UnsupportedAudioError(InharmonicaError):
    pass


class NoAcceptedFramesError(InharmonicaError):
    pass
