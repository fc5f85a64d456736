import pytest

from config import bundled_log, bundled_net, bundled_spec
from ltlf import Constraint
from petrinet import build_net, read_pnml
from synthesis import synthesize

RUNNING_PNML = bundled_net("running_example.pnml")
NON_FREE_CHOICE_PNML = bundled_net("non_free_choice.pnml")
RUNNING_CSV = bundled_log("running_example.csv")
RUNNING_XES = bundled_log("running_example.xes")
WITHOUT_END_SPEC = bundled_spec("running_example_without_end.txt")

RUNNING_CONSTRAINTS = [
    Constraint.at_most_one({"t_a"}),
    Constraint.end({"t_v"}),
    Constraint.alt_prec({"t_a", "t_w"}, {"t_b"}),
    Constraint.alt_prec({"t_b"}, {"t_c", "t_d"}),
    Constraint.alt_prec({"t_c", "t_d"}, {"t_e"}),
    Constraint.alt_prec({"t_e"}, {"t_f"}),
    Constraint.alt_prec({"t_e"}, {"t_g"}),
    Constraint.alt_prec({"t_f"}, {"t_u"}),
    Constraint.alt_prec({"t_g"}, {"t_u"}),
    Constraint.alt_prec({"t_u"}, {"t_v", "t_w"}),
]

LETTERS = ["a", "b", "c", "d", "e", "f", "g", "u", "v", "w"]

EXAMPLE_SPEC = [
    Constraint.at_most_one({"a"}),
    Constraint.end({"v"}),
    Constraint.alt_prec({"e"}, {"f"}),
    Constraint.alt_prec({"a", "w"}, {"b"}),
    Constraint.alt_prec({"u"}, {"v", "w"}),
]


def mutate(net, remove=(), add=(), transitions=()):
    """Copy of net with arcs removed/added and extra transitions"""
    arcs = (set(net.flow) - set(remove)) | set(add)
    return build_net(net.places, [*net.transitions, *transitions], arcs, name=net.name + "_mutant")


@pytest.fixture
def running_net():
    return read_pnml(RUNNING_PNML)


@pytest.fixture
def running_spec(running_net):
    return synthesize(running_net)


@pytest.fixture
def non_free_choice_net():
    return read_pnml(NON_FREE_CHOICE_PNML)


@pytest.fixture
def deadlock_net(running_net):
    # t_d feeds p5 instead of p3: after a, b, d, g only p7 is marked
    return mutate(running_net, remove=[("t_d", "p3")], add=[("t_d", "p5")])


@pytest.fixture
def improper_net(running_net):
    return mutate(running_net, add=[("p5", "t_x"), ("t_x", "p9")], transitions=["t_x"])


@pytest.fixture
def dead_transition_net(running_net):
    return mutate(running_net, add=[("p2", "t_z"), ("p8", "t_z"), ("t_z", "p9")], transitions=["t_z"])


@pytest.fixture
def unsafe_net(running_net):
    return mutate(running_net, add=[("t_b", "p5")])


@pytest.fixture
def small_unsafe_net():
    arcs = [("p0", "t1"), ("t1", "p1"), ("t1", "p2"), ("p1", "t2"), ("t2", "p3"),
            ("p2", "t3"), ("t3", "p3"), ("p3", "t4"), ("t4", "p4")]
    return build_net(["p0", "p1", "p2", "p3", "p4"], ["t1", "t2", "t3", "t4"], arcs, name="small_unsafe")


@pytest.fixture
def one_transition_net():
    return build_net(["p1", "p2"], ["t1"], [("p1", "t1"), ("t1", "p2")], name="one_transition")
