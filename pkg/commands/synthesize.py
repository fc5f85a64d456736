import fsa as automata
from helpers import EXIT_OK, ensure_written, load_net, report
from statespace import analyze
from synthesis import serialize, synthesize


def run(config):
    """Write the Declare specification of a safe and sound net"""
    net = load_net(config.input)
    _, soundness = analyze(net, config.state_limit)
    spec = synthesize(net, soundness, force=config.force)

    if config.fmt == "dot":
        sfsa = automata.specification_fsa(spec.constraints, spec.alphabet)
        data = automata.to_dot(sfsa, name=f"{net.name}_specification").source.encode("utf-8")
    else:
        data = serialize(spec, config.fmt if config.fmt in ("text", "json") else "text")

    counts = f"constraints={len(spec.constraints)} literals={spec.literal_count()}"
    payload = {"net": net.name, "constraints": len(spec.constraints), "literals": spec.literal_count(),
               "forced": not (soundness.safe and soundness.sound)}
    if config.json and not config.output:
        payload["specification"] = data.decode("utf-8")
    else:
        ensure_written(config.output, data)

    report(config, counts, payload, stderr=not config.output)
    return EXIT_OK
