"""Exception types shared across the package.

Every error carries a machine-readable ``code`` so the HTTP layer and the
CLI can report failures uniformly.
"""


class StexifyError(Exception):
    code = "error"


# --- grammar files and validation ---------------------------------------

class GrammarSyntaxError(StexifyError):
    code = "grammar_syntax"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class DuplicateTerminalError(StexifyError):
    code = "duplicate_terminal"


class EmptyGrammarError(StexifyError):
    code = "empty_grammar"


class UndefinedNonterminalError(StexifyError):
    code = "undefined_nonterminal"

    def __init__(self, name: str, location: str = ""):
        suffix = f" at {location}" if location else ""
        super().__init__(f"no rule or terminal named '{name}'{suffix}")
        self.name = name


class InvalidGrammarError(StexifyError):
    """Raised by table compilation when validation found hard errors."""

    code = "invalid_grammar"

    def __init__(self, report):
        super().__init__(str(report))
        self.report = report


# --- scanning and parsing ------------------------------------------------

class UnknownRecognizerError(StexifyError):
    code = "unknown_recognizer"


class TooManyParsesError(StexifyError):
    code = "too_many_parses"

    def __init__(self, count: int, exact: bool):
        kind = "exactly" if exact else "at least"
        super().__init__(f"{kind} {count} parse trees exceed the enumeration cap")
        self.count = count
        self.exact = exact


# --- AST building and emission -------------------------------------------

class ActionMismatchError(StexifyError):
    code = "action_mismatch"


class EmptyFlexaryError(StexifyError):
    code = "empty_flexary"


# --- document handling ----------------------------------------------------

class UnterminatedMathError(StexifyError):
    code = "unterminated_math"

    def __init__(self, position: int, what: str = "math mode"):
        super().__init__(f"unterminated {what} starting at position {position}")
        self.position = position


# --- grammar generation ----------------------------------------------------

class MalformedDeclarationError(StexifyError):
    code = "malformed_declaration"

    def __init__(self, message: str, position: int):
        super().__init__(f"offset {position}: {message}")
        self.position = position


class NameCollisionError(StexifyError):
    code = "name_collision"


# --- sessions ---------------------------------------------------------------

class UnknownFormulaError(StexifyError):
    code = "unknown_formula"


class UnknownSessionError(StexifyError):
    code = "unknown_session"


class BadIndexError(StexifyError):
    code = "bad_index"


class InvalidStatusError(StexifyError):
    code = "invalid_status"


class PendingAmbiguitiesError(StexifyError):
    code = "pending_ambiguities"

    def __init__(self, formula_ids):
        ids = ", ".join(str(i) for i in formula_ids)
        super().__init__(f"formulas still ambiguous: {ids}")
        self.formula_ids = list(formula_ids)


class DocumentChangedError(StexifyError):
    code = "document_changed"
