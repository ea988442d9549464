import pytest

from tracelift.sampledata import ScenarioRepo, build_scenario_repo, build_taxonomy_iterations


@pytest.fixture
def scenario(tmp_path) -> ScenarioRepo:
    return build_scenario_repo(tmp_path / "demo")


@pytest.fixture(scope="session")
def iterations():
    return build_taxonomy_iterations()
