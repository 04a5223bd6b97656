from pathlib import Path

import pytest

from hddl.pipeline import load_ground, load_model

CORPUS = Path(__file__).parent / "corpus"
TRANSPORT = CORPUS / "transport-domain.hddl"

# (domain, problem) pairs that are expected to validate.
INSTANCES = {
    "transport-1": ("transport-domain.hddl", "transport-p1.hddl"),
    "transport-2": ("transport-domain.hddl", "transport-p2.hddl"),
    "transport-verbatim": ("transport-domain.hddl", "transport-problem-verbatim.hddl"),
    "transport-params": ("transport-domain.hddl", "transport-htn-params.hddl"),
    "transport-goal": ("transport-domain.hddl", "transport-goal.hddl"),
    "shop-order": ("shop-order-domain.hddl", "shop-order-problem.hddl"),
    "quantified": ("quantified-domain.hddl", "quantified-problem.hddl"),
    "conditional": ("conditional-domain.hddl", "conditional-problem.hddl"),
    "method-prec-po": ("method-prec-po-domain.hddl", "method-prec-po-problem.hddl"),
    "constants": ("constants-domain.hddl", "constants-problem.hddl"),
    "factory": ("factory-domain.hddl", "factory-problem.hddl"),
    "empty": ("empty-domain.hddl", "empty-problem.hddl"),
}


def corpus(name: str) -> Path:
    return CORPUS / name


def ground_instance(key: str, **kw):
    d, p = INSTANCES[key]
    return load_ground(corpus(d), corpus(p), **kw)


def model_instance(key: str, **kw):
    d, p = INSTANCES[key]
    return load_model(corpus(d), corpus(p), **kw)[0]


@pytest.fixture(scope="session")
def transport1():
    return ground_instance("transport-1")


@pytest.fixture(scope="session")
def transport2():
    return ground_instance("transport-2")


# Lines printed by the acceptance suite, repeated in the terminal summary so
# they are visible without -s.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
