"""Exception hierarchy. Every error raised by the package derives from PixelGraphError."""


class PixelGraphError(ValueError):
    code = "error"


class LengthMismatch(PixelGraphError):
    code = "length_mismatch"


class LevelOutOfRange(PixelGraphError):
    code = "level_out_of_range"


class Disconnected(PixelGraphError):
    code = "disconnected"


class ShapeMismatch(PixelGraphError):
    code = "shape_mismatch"


class ResourceCap(PixelGraphError):
    code = "resource_cap"


class ProfileExhausted(PixelGraphError):
    code = "profile_exhausted"


class InvalidParam(PixelGraphError):
    code = "invalid_param"


class RejectionBudgetExceeded(PixelGraphError):
    code = "rejection_budget_exceeded"


class DepthExceeded(PixelGraphError):
    code = "depth_exceeded"


class TrialsTooSmall(PixelGraphError):
    code = "trials_too_small"
