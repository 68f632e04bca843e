import pytest

from canfill.core import ProblemInstance
from canfill.dataset import DatasetSpec, generate_dataset, load_dataset
from canfill.encoder import PenaltyWeights


@pytest.fixture
def trivial():
    return ProblemInstance("trivial", n=2, m=2, p=(1, 1), p_max=3)


@pytest.fixture
def small3():
    return ProblemInstance("small3", n=3, m=3, p=(1, 1, 2), p_max=3)


@pytest.fixture
def unit_weights():
    return PenaltyWeights(1.0, 1.0)


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("dataset")
    generate_dataset(DatasetSpec(), out)
    return out


@pytest.fixture(scope="session")
def dataset(dataset_dir):
    return load_dataset(dataset_dir)


# acceptance verdicts, printed once at the end of the run
VERDICTS: dict[int, tuple[bool, str]] = {}


def record_verdict(number: int, ok: bool, detail: str) -> None:
    VERDICTS[number] = (ok, detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(VERDICTS):
        ok, detail = VERDICTS[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} ({detail})")
