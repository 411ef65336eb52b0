class JackMacError(ValueError):
    pass


class UnrepresentableError(JackMacError):
    pass


class FormatMismatchError(JackMacError):
    pass


class LaneMismatchError(JackMacError):
    pass


class ShapeMismatchError(JackMacError):
    pass


class UnsupportedModeError(JackMacError):
    pass


class ConfigError(JackMacError):
    pass


class TensorFileError(JackMacError):
    pass
