"""Exception hierarchy shared by all modules."""


class TagplanError(Exception):
    pass


# -- loading -----------------------------------------------------------------


class LoadError(TagplanError):
    """Raised for malformed or invalid input files."""


class ParseError(LoadError):
    def __init__(self, message, source="<input>", line=None, column=None):
        self.source = source
        self.line = line
        self.column = column
        where = source
        if line is not None:
            where = f"{source}:{line}:{column}"
        super().__init__(f"{where}: {message}")


class UnboundVariable(LoadError):
    pass


class TreeShapeError(LoadError):
    pass


class FootNodeViolation(TreeShapeError):
    pass


class ArityClash(LoadError):
    pass


# -- knowledge ---------------------------------------------------------------


class NonGroundFact(TagplanError):
    pass


# -- grammar -----------------------------------------------------------------


class GrammarError(TagplanError):
    pass


class NotASite(GrammarError):
    pass


class CategoryMismatch(GrammarError):
    pass


class FeatureClash(GrammarError):
    pass


class IndexArityMismatch(GrammarError):
    pass


class CannotAdjoinAtLeaf(GrammarError):
    pass


class IncompleteTree(GrammarError):
    pass


# -- lexicon -----------------------------------------------------------------


class NoTruthfulInstantiation(TagplanError):
    pass


class UncoveredVariable(TagplanError):
    pass


class UnprovableRequirement(TagplanError):
    """A forced requirement (override, definite NP, pragmatics) is not common ground."""


# -- reference ---------------------------------------------------------------


class MissingContextSet(TagplanError):
    pass


class EmptyDomain(TagplanError):
    pass


class SearchBoundExceeded(TagplanError):
    pass


# -- planner -----------------------------------------------------------------


class GenerationFailure(TagplanError):
    def __init__(self, diagnosis, state=None, trace=None):
        self.diagnosis = diagnosis
        self.state = state
        self.trace = trace or []
        super().__init__(diagnosis.summary())
