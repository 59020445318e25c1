"""
Domain errors for the CPRT toolkit.

InputError subclasses mean the caller handed us something malformed (exit
code 1 on the command line); ValidationFailure subclasses mean a taxonomy or
property constraint does not hold (exit code 2).
"""


class CPRTError(Exception):
    """Root of every error raised by the cprt app."""


class InputError(CPRTError):
    exit_code = 1


class ValidationFailure(CPRTError):
    exit_code = 2


# Taxonomy

class AllNegativeError(InputError):
    def __init__(self, answers=None):
        self.answers = answers
        super().__init__("No decision question answered yes; attribute is outside taxonomy scope")


class DuplicateIdError(InputError):
    def __init__(self, attribute_id):
        self.attribute_id = attribute_id
        super().__init__(f"Duplicate attribute id: {attribute_id}")


class InconsistentLevelError(InputError):
    def __init__(self, attribute_id, stated, derived):
        self.attribute_id = attribute_id
        self.stated = stated
        self.derived = derived
        super().__init__(
            f"Attribute {attribute_id} states level {stated} but its answers derive level {derived}"
        )


class InvalidWeightsError(ValidationFailure):
    def __init__(self, level, weight, bound):
        self.level = level
        self.weight = weight
        self.bound = bound
        super().__init__(
            f"Weight constraint violated at level {level}: w{level}={weight} must exceed {bound}"
        )


class InvalidBoundariesError(ValidationFailure):
    pass


# Scoring

class OutOfRangeError(InputError):
    def __init__(self, value, low=0.0, high=1.0):
        self.value = value
        super().__init__(f"Value {value} outside [{low}, {high}]")


class LengthMismatchError(InputError):
    def __init__(self, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(f"Length mismatch: expected {expected}, got {actual}")


class EmptyInputError(InputError):
    def __init__(self, what="input"):
        super().__init__(f"Empty {what}")


# Boundary derivation

class ZeroVectorError(InputError):
    def __init__(self):
        super().__init__("All-zero attribute vector cannot be embedded")


class DegenerateDatasetError(InputError):
    def __init__(self, levels):
        self.levels = levels
        super().__init__(f"Need at least two distinct max levels to form triplets, got {sorted(levels)}")


class EmptyReferencesError(InputError):
    def __init__(self):
        super().__init__("No reference samples left for IDW interpolation")


class MissingLevelError(InputError):
    def __init__(self, level):
        self.level = level
        super().__init__(f"No reference samples at level {level}")


class NonMonotoneThresholdsError(ValidationFailure):
    def __init__(self, thresholds):
        self.thresholds = thresholds
        super().__init__(f"Per-level thresholds are not strictly decreasing by level: {thresholds}")


# Annotation

class IdMismatchError(InputError):
    def __init__(self, left, right):
        super().__init__(f"Records refer to different images: {left} != {right}")


# Metrics

class ConstantInputError(InputError):
    def __init__(self, name="input"):
        super().__init__(f"Correlation undefined: {name} is constant")


class EmptyPairsError(InputError):
    def __init__(self):
        super().__init__("No pairs to score")


class TiedGroundTruthError(InputError):
    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"Pair {pair} has tied ground-truth scores")


class NoEligiblePairsError(InputError):
    def __init__(self, mode):
        self.mode = mode
        super().__init__(f"No eligible {mode}-level pairs")


# Dataset I/O

class ParseError(InputError):
    def __init__(self, line, detail):
        self.line = line
        self.detail = detail
        super().__init__(f"Line {line}: {detail}")


class UnknownAttributeError(ParseError):
    def __init__(self, line, attribute_id):
        self.attribute_id = attribute_id
        super().__init__(line, f"unknown attribute id '{attribute_id}'")


class BadLabelValueError(ParseError):
    def __init__(self, line, detail):
        super().__init__(line, detail)


class MissingAnnotatorError(InputError):
    def __init__(self, image_id, expected, actual):
        self.image_id = image_id
        super().__init__(f"Image {image_id} has {actual} annotator(s), needs {expected}")


class ModeMismatchError(InputError):
    pass


class NoScoreFoundError(InputError):
    def __init__(self, text):
        snippet = text[:80]
        super().__init__(f"No score found in response: {snippet!r}")
