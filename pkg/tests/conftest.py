import json

import pytest

from alignui import dataset as ds
from alignui.gateway import Gateway, MockProvider


@pytest.fixture()
def pilot_dataset():
    return ds.bundled_dataset("pilot")


@pytest.fixture()
def full_dataset():
    return ds.bundled_dataset("full")


def make_gateway(responses, max_calls=None):
    """Gateway over a scripted mock, with sleeping disabled."""
    return Gateway(
        provider=MockProvider(list(responses)),
        max_calls=max_calls,
        sleeper=lambda _: None,
    )


def reasoning_response(per_aspect, relevant="", task="user task"):
    """Build a model reasoning reply; per_aspect maps aspect name -> [(token, why)]."""
    doc = {"user task": task, "user preference aspect": "as requested"}
    if relevant:
        doc["relevant tasks from the dataset"] = relevant
    for aspect_name, picks in per_aspect.items():
        doc[f"{aspect_name}_reasoning"] = {token: why for token, why in picks}
    return json.dumps(doc)
