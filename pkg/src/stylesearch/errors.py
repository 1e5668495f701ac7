"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Array dimensions do not compose (layer shapes, vector dims, kernel sizes)."""


class ContractError(RuntimeError):
    """A caller violated an API precondition that is not a pure shape issue."""


class FormatError(ValueError):
    """A persisted file (CSV header, FNNW, FEMB, manifest, config) is malformed."""


class DecodeError(ValueError):
    """An image file could not be decoded."""

    def __init__(self, path, reason=""):
        self.path = str(path)
        msg = f"cannot decode image {self.path}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
