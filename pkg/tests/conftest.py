import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get("GRIDGROUPS_LONG_TESTS"):
        return
    skip = pytest.mark.skip(reason="stretch run; set GRIDGROUPS_LONG_TESTS=1")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)
