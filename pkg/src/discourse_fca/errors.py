"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """A bit vector does not fit the context it is used with."""


class VocabularyMismatch(ValueError):
    """Two contexts that must share an attribute vocabulary do not."""


class ResourceLimitExceeded(RuntimeError):
    """An enumeration outgrew its configured cap."""


class ConceptLimitExceeded(ResourceLimitExceeded):
    pass


class RuleLimitExceeded(ResourceLimitExceeded):
    pass


class LatticeError(ValueError):
    """A concept list is not the complete concept set of one context."""


class DisjointnessViolation(ValueError):
    pass


class EmptyAntecedentCover(ValueError):
    pass


class EmptyConsequentCover(ValueError):
    pass


class EmptyRuleSet(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class SchemaMismatch(ValueError):
    """Too many input rows failed validation to trust the file."""


class DuplicateObject(ValueError):
    pass


class AmbiguousAnchor(ValueError):
    """A rule antecedent carries more than one topic attribute."""


class InfeasibleSpec(ValueError):
    """A synthetic spec cannot be realised; the message names the bound."""
