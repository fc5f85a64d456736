from helpers import EXIT_NEGATIVE, EXIT_OK, load_net, report
from synthesis import read_spec, synthesize, verify_equivalence


def run(config):
    """Compare a net with its synthesized (or a given) specification"""
    net = load_net(config.input)
    if config.spec:
        spec = read_spec(config.spec)
    else:
        spec = synthesize(net, force=config.force, bound=config.state_limit)
    result = verify_equivalence(net, spec, config.state_limit)

    payload = {"net": net.name, "verdict": result.verdict,
               "witness": list(result.witness) if result.witness is not None else None,
               "accepted_by": result.accepted_by}
    report(config, result.describe(), payload)
    return EXIT_OK if result.equivalent else EXIT_NEGATIVE
