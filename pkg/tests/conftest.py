import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tagplan.cli import fixture_path  # noqa: E402
from tagplan.loading import read_goals, read_lexicon, read_scene  # noqa: E402


def load(name, scene="scene", lexicon="lexicon", goals="goals"):
    return (
        read_scene(fixture_path(name, scene + ".json")),
        read_lexicon(fixture_path(name, lexicon + ".json")),
        read_goals(fixture_path(name, goals + ".json")),
    )


@pytest.fixture
def rabbit():
    return load("rabbit")


@pytest.fixture
def kitchen():
    return load("kitchen")
