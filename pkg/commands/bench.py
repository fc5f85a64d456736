import glob
import os

from benchgen import corpus_csv, run_benchmark, run_corpus
from errors import ContractViolation
from helpers import EXIT_NEGATIVE, EXIT_OK, ensure_written, report


def run(config):
    """Synthesis benchmark over a generated chain, or over a folder of PNML models"""
    if config.corpus:
        paths = sorted(glob.glob(os.path.join(config.corpus, "*.pnml")))
        if not paths:
            raise ContractViolation(f"no .pnml files in {config.corpus}")
        frame = run_corpus(paths, config.state_limit)
        ensure_written(config.output, corpus_csv(frame))
        report(config, f"{len(frame)} models measured", {"models": len(frame)}, stderr=not config.output)
        return EXIT_OK

    series = run_benchmark(config.mode, config.iterations, config.audit_every, config.audit_state_limit)
    ensure_written(config.output, series.to_csv())

    failed = [a for a in series.audits if not a.passed]
    lines = [f"{config.mode}: {len(series.records)} iterations, R2={series.fit.r2:.4f}, "
             f"beta={series.fit.slope:.6f} ms/iteration"]
    for a in series.audits:
        lines.append(f"  audit {a.iteration}: {a.status}" + (f" ({a.witness})" if a.witness else ""))
    payload = {"mode": config.mode, "iterations": len(series.records), **series.fit.to_dict(),
               "audits": [{"iteration": a.iteration, "status": a.status} for a in series.audits]}
    report(config, "\n".join(lines), payload, stderr=not config.output)
    return EXIT_NEGATIVE if failed else EXIT_OK
