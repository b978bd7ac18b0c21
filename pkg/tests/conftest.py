import numpy as np
import pytest

from logiwave.model import LogisticWave, MultilogisticModel
from logiwave.synthetic import synthesize, reference_model

# Noise seed for the 22-wave reference round trip; fixed before any decomposition was run.
REFERENCE_SEED = 0
REFERENCE_SIGMA = 50.0


def single_wave_series(a, b, y_sat, n, d=0.0):
    """Monthly series of one logistic wave (its derivative-space pulse)."""
    return synthesize(MultilogisticModel(0.0, d, [LogisticWave(a, b, y_sat)]), n=n)


def match_wave(truth, waves):
    """Recovered wave of the same sign closest to ``truth`` in (b, log a)."""
    same = [w for w in waves if np.sign(w.y_sat) == np.sign(truth.y_sat)]
    if not same:
        return None
    return min(same, key=lambda w: abs(w.b - truth.b) + 10.0 * abs(np.log(w.a / truth.a)))


def within_tolerance(truth, found, db=3.0, rel_a=0.25):
    return (found is not None and abs(found.b - truth.b) <= db
            and abs(found.a - truth.a) / truth.a <= rel_a)


@pytest.fixture(scope="session")
def reference_noisy():
    return synthesize(reference_model(), noise_sigma=REFERENCE_SIGMA, seed=REFERENCE_SEED)


@pytest.fixture(scope="session")
def reference_decomposition(reference_noisy):
    from logiwave.decomposition import decompose
    return decompose(reference_noisy)


# one line per acceptance criterion, printed after the test summary
ACCEPTANCE = []


def record_criterion(number, status, detail):
    line = f"criterion {number}: {status:<4}  {detail}"
    ACCEPTANCE.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
