from conformance import check, read_log
from errors import ContractViolation
from helpers import EXIT_NEGATIVE, EXIT_OK, ensure_written, load_spec, report


def run(config):
    """Fitness of an event log against a specification or a net's specification"""
    if not config.log:
        raise ContractViolation("an event log is required (--log PATH)")
    spec = load_spec(config.input, config)
    log = read_log(config.log, alphabet=spec.alphabet, policy=config.alphabet_policy,
                   sort_by_time=config.sort_by_time)
    fitness = check(log, spec, config.sample_cap)

    if config.report_format == "xlsx":
        if not config.output:
            raise ContractViolation("--report-format xlsx needs --out PATH")
        ensure_written(config.output, fitness.to_excel())
        report(config, fitness.to_text(), fitness.to_dict())
    elif config.report_format == "json" or config.json:
        if config.output:
            ensure_written(config.output, fitness.to_json())
            report(config, fitness.to_text(), fitness.to_dict() if config.json else None)
        else:
            ensure_written(None, fitness.to_json())
    else:
        if config.output:
            ensure_written(config.output, fitness.to_text().encode("utf-8"))
        report(config, fitness.to_text())
    return EXIT_OK if fitness.all_fit else EXIT_NEGATIVE
