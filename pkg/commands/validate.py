from helpers import EXIT_NEGATIVE, EXIT_OK, ensure_written, load_net, report
from statespace import analyze, to_dot


def run(config):
    """Structural, safety and soundness report for one net"""
    net = load_net(config.input)
    places, transitions, arcs = net.sizes()
    rfsa, soundness = analyze(net, config.state_limit)

    ok = soundness.safe and soundness.sound
    lines = [
        f"net: {net.name} ({places} places, {transitions} transitions, {arcs} arcs)",
        f"safe: {'yes' if soundness.safe else 'no'}, sound: {'yes' if ok else 'no'}",
        soundness.describe(),
    ]
    dot_on_stdout = False
    if config.fmt == "dot" and rfsa is not None:
        ensure_written(config.output, to_dot(rfsa).source.encode("utf-8"))
        dot_on_stdout = not config.output or config.output == "-"

    payload = {"net": net.name, "places": places, "transitions": transitions, "arcs": arcs,
               **soundness.to_dict()}
    # stdout carries the DOT document alone
    report(config, "\n".join(line for line in lines if line), None if dot_on_stdout else payload,
           stderr=dot_on_stdout)
    return EXIT_OK if ok else EXIT_NEGATIVE
