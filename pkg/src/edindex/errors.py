class EdIndexError(Exception):
    """Base class for domain failures (CLI exit code 1)."""


class LengthMismatch(EdIndexError, ValueError):
    pass


class AlphabetMismatch(EdIndexError, ValueError):
    pass


class InvalidScript(EdIndexError, ValueError):
    pass


class InvalidMatching(EdIndexError, ValueError):
    pass


class ConstructionFailed(EdIndexError, RuntimeError):
    """A randomized construction hit its iteration cap."""


class ListOverflow(EdIndexError, RuntimeError):
    """A block decoder returned more candidates than its advertised list cap."""


class DecodeFailure(EdIndexError):
    """Decoding could not certify a message (budget exceeded or ECC failure)."""


class EngineFailure(EdIndexError):
    def __init__(self, round_no, cause):
        super().__init__(f"LCS engine failed in round {round_no}: {cause}")
        self.round_no = round_no
        self.cause = cause


class BlockDecodeError(EdIndexError):
    def __init__(self, layer, block, cause):
        super().__init__(f"layer {layer} block decoder failed on block {block}: {cause}")
        self.layer = layer
        self.block = block
        self.cause = cause
