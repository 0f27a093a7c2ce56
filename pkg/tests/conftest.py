from datetime import datetime, timedelta, timezone

import pytest

from snp.events import replay
from snp.fixtures import contest_fixture, figure1_fixture
from snp.graph import ReferralGraph

T0 = datetime(2014, 4, 1, tzinfo=timezone.utc)


def at(seconds: int) -> datetime:
    return T0 + timedelta(seconds=seconds)


@pytest.fixture
def mini_fixture():
    return contest_fixture("mini")


@pytest.fixture
def mini_graph(mini_fixture):
    return replay(mini_fixture.records)


@pytest.fixture
def figure1_graph() -> ReferralGraph:
    return replay(figure1_fixture().records)
