import numpy as np
import pytest

from streamridge.features import FeatureRecord, ProjectionBuffer


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Print one PASS/FAIL line per acceptance criterion."""
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.fspath.basename == "test_acceptance.py":
        verdict = "PASS" if rep.passed else "FAIL"
        print(f"\n[ACCEPTANCE] {item.name}: {verdict}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_buf():
    return ProjectionBuffer(d_feat=4, d_buf=6, seed=11)


def make_records(labels, task_ids, vectors):
    return [
        FeatureRecord(label=int(l), task_id=int(t), vector=np.asarray(v, dtype=np.float32))
        for l, t, v in zip(labels, task_ids, vectors)
    ]


def buffer_with_weights(weights, seed=0):
    """Buffer whose random weights are replaced by a hand-made matrix."""
    weights = np.asarray(weights, dtype=np.float64)
    buf = ProjectionBuffer(d_feat=weights.shape[0], d_buf=weights.shape[1], seed=seed)
    weights.setflags(write=False)
    buf.weights = weights
    return buf
