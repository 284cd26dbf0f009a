import numpy as np
import pytest

from mlpg.minilang import analyze
from mlpg.graphs import build_file_analysis, make_varmisuse_sample, \
    make_varnaming_sample, SlotRejected


LOOP_SNIPPET = """
fn foo() -> int {
    return 1;
}
fn main(x: int, y: int) {
    (x, y) = foo();
    while (x > 0) {
        x = x + y;
    }
}
"""

SMALL_PROGRAM = """
fn addUp(limit: int, step: int) -> int {
    var total: int = 0;
    var idx: int = 0;
    while (idx < limit) {
        total = total + step;
        idx = idx + 1;
    }
    return total;
}
fn main() {
    var count: int = 3;
    var amount: int = addUp(count, 2);
    var sink: int = amount + count;
}
"""


@pytest.fixture(scope="session")
def loop_analysis():
    return build_file_analysis(analyze(LOOP_SNIPPET, "loop"), "loop")


@pytest.fixture(scope="session")
def small_analysis():
    return build_file_analysis(analyze(SMALL_PROGRAM, "small"), "small")


def all_misuse_samples(analysis):
    out = []
    for tok in sorted(analysis.prog.var_of_token):
        try:
            out.append(make_varmisuse_sample(analysis, tok))
        except SlotRejected:
            pass
    return out


def all_naming_samples(analysis):
    return [make_varnaming_sample(analysis, v)
            for v in sorted(analysis.prog.vars)]


@pytest.fixture(scope="session")
def small_misuse(small_analysis):
    return all_misuse_samples(small_analysis)


@pytest.fixture(scope="session")
def small_naming(small_analysis):
    return all_naming_samples(small_analysis)


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
