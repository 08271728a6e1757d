import pytest
from hypothesis import settings as hypothesis_settings

from roommates.config import Settings, use_settings
from roommates.formats import serialize_instance

hypothesis_settings.register_profile("default", deadline=None, max_examples=40)
hypothesis_settings.register_profile("sweep", deadline=None, max_examples=500)
hypothesis_settings.load_profile("default")


@pytest.fixture(autouse=True)
def default_settings(monkeypatch):
    """Built-in limits, whatever the environment says."""
    for name in list(Settings.__dataclass_fields__):
        monkeypatch.delenv(f"ROOMMATES_{name.upper()}", raising=False)
    monkeypatch.delenv("ROOMMATES_CONFIG", raising=False)
    use_settings(Settings())
    yield
    use_settings(None)


@pytest.fixture
def instance_file(tmp_path):
    """Write a profile to ``<tmp>/<name>.sr`` and return the path."""

    def write(profile, name="instance", header=None):
        path = tmp_path / f"{name}.sr"
        path.write_text(serialize_instance(profile, header), encoding="utf-8")
        return path

    return write
