from datetime import date, timedelta

import pytest
from hypothesis import settings

from repindex.model import IndexPoint, ReputationSeries

# wall-clock deadlines flake under CI load; example counts stay the default
settings.register_profile("no_deadline", deadline=None)
settings.load_profile("no_deadline")


@pytest.fixture(scope="session")
def make_series():
    def _make(scores, target="entity", start=date(2014, 1, 1), counts=None):
        points = tuple(
            IndexPoint(
                period=start + timedelta(days=i),
                score=s,
                count=1 if counts is None else counts[i],
            )
            for i, s in enumerate(scores)
        )
        return ReputationSeries(target=target, points=points)

    return _make
