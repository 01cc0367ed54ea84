import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from jordanbohr.jts_core import make_domain
from jordanbohr.suites import random_element

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

# desk-scale coverage of every kind, including non-tube and odd TypeII
DOMAINS = [
    ("disc",),
    ("polydisc", 3),
    ("typeI", 2, 3),
    ("typeI", 2, 2),
    ("typeII", 4),
    ("typeII", 5),
    ("typeIII", 3),
    ("typeIV", 4),
    ("typeIV", 1),
    ("ball", 3),
]

DOMAIN_IDS = ["-".join(map(str, d)) for d in DOMAINS]


@pytest.fixture(params=DOMAINS, ids=DOMAIN_IDS)
def spec(request):
    return make_domain(*request.param)


def rand_point(spec, rng, norm=None):
    return random_element(spec, rng, norm)


def rand_vec(spec, rng, scale=1.0):
    return scale * (rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim))
