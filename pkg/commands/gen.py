import os

from benchgen import generate
from errors import ContractViolation
from helpers import EXIT_OK, ensure_written, report
from petrinet import write_pnml


def run(config):
    """Write one PNML file per expansion iteration"""
    if config.iterations < 1:
        raise ContractViolation("gen needs at least one iteration")
    folder = config.output or "generated"
    written = []
    for state in generate(config.mode, config.iterations):
        path = os.path.join(folder, f"{config.mode}_{state.iteration:03d}.pnml")
        ensure_written(path, write_pnml(state.net))
        places, transitions, arcs = state.net.sizes()
        written.append({"path": path, "places": places, "transitions": transitions, "arcs": arcs})

    lines = [f"{w['path']}: {w['places']} places, {w['transitions']} transitions, {w['arcs']} arcs"
             for w in written]
    report(config, "\n".join(lines), {"mode": config.mode, "files": written})
    return EXIT_OK
