"""Exception hierarchy shared by the library modules and the CLI"""


class Wf2DeclareError(Exception):
    """Base class for every error raised by this package"""


class ContractViolation(Wf2DeclareError, ValueError):
    """An operation was called outside its precondition"""


class UnknownNodeError(Wf2DeclareError, LookupError):
    """A place or transition id that the net does not contain"""

    def __init__(self, node):
        super().__init__(f"unknown node: {node!r}")
        self.node = node


class PnmlError(Wf2DeclareError):
    """PNML input rejected; `code` names the diagnostic"""

    def __init__(self, code, message):
        super().__init__(f"[{code}] {message}")
        self.code = code


class UnsafeNetError(Wf2DeclareError):
    """A reachable marking puts more than one token on a place"""

    def __init__(self, marking, place):
        super().__init__(f"net is not safe: place {place!r} holds {marking[place]} tokens in {marking}")
        self.marking = marking
        self.place = place


class StateLimitExceeded(Wf2DeclareError):
    """State-space exploration hit the configured bound"""

    def __init__(self, limit):
        super().__init__(f"state limit of {limit} states exceeded")
        self.limit = limit


class AlphabetMismatch(Wf2DeclareError):
    """Two automata (or a spec and a net) disagree on the alphabet"""


class UnknownSymbolError(Wf2DeclareError):
    """A symbol or atom outside the declared alphabet"""

    def __init__(self, symbol):
        super().__init__(f"symbol {symbol!r} is not in the alphabet")
        self.symbol = symbol


class SynthesisRefused(Wf2DeclareError):
    """Synthesis needs a safe and sound net"""

    def __init__(self, failed):
        self.failed = tuple(failed)
        super().__init__("refusing to synthesize: net fails " + ", ".join(self.failed))


class SpecFormatError(Wf2DeclareError):
    """A serialized specification could not be read or written"""


class LogIngestError(Wf2DeclareError):
    """An event log could not be ingested"""


class DegenerateFitError(ContractViolation):
    """Linear fit over fewer than two distinct x values"""


class OutputError(Wf2DeclareError):
    """A result could not be written"""
