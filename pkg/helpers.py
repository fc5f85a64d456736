import json
import logging
import os
import sys

from errors import (AlphabetMismatch, ContractViolation, LogIngestError, OutputError, PnmlError,
                    SpecFormatError, StateLimitExceeded, SynthesisRefused, UnknownSymbolError,
                    UnsafeNetError, Wf2DeclareError)
from petrinet import read_pnml
from synthesis import read_spec, synthesize

logger = logging.getLogger(__name__)

# -------------------- Exit Codes --------------------
EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_OUTPUT = 3
EXIT_RESOURCE = 4


def exit_code_for(error):
    """Map an exception to the CLI exit code"""
    if isinstance(error, (StateLimitExceeded, MemoryError)):
        return EXIT_RESOURCE
    if isinstance(error, OutputError):
        return EXIT_OUTPUT
    if isinstance(error, (UnsafeNetError, SynthesisRefused)):
        return EXIT_NEGATIVE
    if isinstance(error, (PnmlError, SpecFormatError, LogIngestError, UnknownSymbolError,
                          AlphabetMismatch, ContractViolation, OSError, Wf2DeclareError)):
        return EXIT_INPUT
    return None


# -------------------- Input --------------------
def load_net(path):
    """Parse a PNML file, FileNotFoundError included as an input error"""
    if not path:
        raise ContractViolation("an input net is required (--in PATH)")
    return read_pnml(path)


def load_spec(path, config):
    """A specification file, or one synthesized on the fly from a PNML net"""
    if not path:
        raise ContractViolation("an input net or specification is required (--in PATH)")
    if str(path).lower().endswith(".pnml"):
        return synthesize(load_net(path), force=config.force, bound=config.state_limit)
    return read_spec(path)


# -------------------- Output --------------------
def write_output(path, data):
    """Write bytes to path, or to standard output when path is empty or '-'"""
    try:
        if not path or path == "-":
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
            return True, "written to standard output"
        folder = os.path.dirname(os.path.abspath(path))
        os.makedirs(folder, exist_ok=True)
        with open(path, "wb") as fh:
            fh.write(data)
        return True, f"written to {path}"
    except OSError as e:
        return False, f"cannot write {path}: {e}"


def ensure_written(path, data):
    """write_output, raising OutputError on failure"""
    success, message = write_output(path, data)
    if not success:
        raise OutputError(message)
    logger.info(message)


def report(config, text, payload=None, stderr=False):
    """Human-readable text, or JSON on stdout with the text on stderr under --json"""
    if config.json:
        if text:
            print(text, file=sys.stderr)
        if payload is not None:
            print(json.dumps(payload, indent=2))
    elif text:
        print(text, file=sys.stderr if stderr else sys.stdout)
