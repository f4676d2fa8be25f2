from fluvius.error import UnprocessableError, NotFoundError


class MeshValidationError(UnprocessableError):
    pass


class DegenerateElementError(UnprocessableError):
    pass


class MeshFormatError(UnprocessableError):
    pass


class ReferenceContainmentError(UnprocessableError):
    pass


class PhiFitError(UnprocessableError):
    pass


class ExpansionSizeError(UnprocessableError):
    pass


class ModelNotFoundError(NotFoundError):
    pass


class ModelFormatError(UnprocessableError):
    pass


class TrainingDivergedError(UnprocessableError):
    pass


class ConstitutiveEvaluationError(UnprocessableError):
    pass


class NonPositiveJacobian(ConstitutiveEvaluationError):
    def __init__(self, errcode, message, jacobian=None, element=None):
        super().__init__(errcode, message)
        self.jacobian = jacobian
        self.element = element


class SingularTangentError(UnprocessableError):
    def __init__(self, errcode, message, increment=None, iteration=None):
        super().__init__(errcode, message)
        self.increment = increment
        self.iteration = iteration


class ConfigurationError(UnprocessableError):
    pass
