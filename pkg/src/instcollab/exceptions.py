"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`InstCollabError`, and most also from :class:`ValueError` or
:class:`KeyError` so callers that only know the builtin types still
catch them.
"""


class InstCollabError(Exception):
    pass


# ingest

class MissingColumn(InstCollabError, ValueError):
    def __init__(self, tag):
        self.tag = tag
        super().__init__(f"required column {tag!r} missing from header")


class MalformedRow(InstCollabError, ValueError):
    def __init__(self, line_no, detail="column count does not match header"):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {detail}")


class NonNumericScore(InstCollabError, ValueError):
    def __init__(self, line_no, value=None):
        self.line_no = line_no
        self.value = value
        super().__init__(f"line {line_no}: non-integer score {value!r}")


# embeddings

class HeaderMismatch(InstCollabError, ValueError):
    pass


class DimensionMismatch(InstCollabError, ValueError):
    def __init__(self, line_no, expected, got):
        self.line_no = line_no
        super().__init__(f"line {line_no}: expected {expected} components, got {got}")


class DuplicateToken(InstCollabError, ValueError):
    def __init__(self, token):
        self.token = token
        super().__init__(f"duplicate token {token!r}")


class EmptyVocabulary(InstCollabError, ValueError):
    pass


class NoVector(InstCollabError, KeyError):
    def __init__(self, phrase):
        self.phrase = phrase
        super().__init__(phrase)

    def __str__(self):
        return f"no in-vocabulary token in phrase {self.phrase!r}"


# recommender

class UnknownInstitution(InstCollabError, KeyError):
    def __init__(self, institution):
        self.institution = institution
        super().__init__(institution)

    def __str__(self):
        return f"unknown institution {self.institution!r}"


class AreaNotCore(InstCollabError, ValueError):
    def __init__(self, area, institution):
        self.area, self.institution = area, institution
        super().__init__(f"{area!r} is not a core competency area of {institution!r}")


class AreaNotPotential(InstCollabError, ValueError):
    def __init__(self, area, institution):
        self.area, self.institution = area, institution
        super().__init__(
            f"{area!r} is not a potential core competency area of {institution!r}"
        )


# evaluation

class EmptyFrequencyTable(InstCollabError, ValueError):
    pass


class AllZero(InstCollabError, ValueError):
    pass


class DegenerateClassCount(InstCollabError, ValueError):
    pass


class OutOfRange(InstCollabError, ValueError):
    pass


# pipeline

class ConfigError(InstCollabError, ValueError):
    pass


class MissingUpstream(InstCollabError, RuntimeError):
    def __init__(self, stage, path=None):
        self.stage = stage
        self.path = path
        msg = f"stage {stage!r} is missing upstream output"
        if path is not None:
            msg += f" {path}"
        super().__init__(msg)
