import pytest
from pydantic import ValidationError

from smrep.contracts import SMOKE_MAX_EPOCHS, RunConfig, ScalePreset, derive_seed, environment_key
from smrep.models.contracts import ArchitectureKind


def test_defaults_cover_every_architecture_and_environment():
    config = RunConfig()
    assert config.architectures == list(ArchitectureKind)
    assert config.environments == ["square", "rooms1", "rooms2"]
    assert config.total_steps == 100_000


def test_smoke_scale_caps_epochs():
    config = RunConfig(scale="smoke")
    assert config.training.max_epochs == SMOKE_MAX_EPOCHS
    assert config.total_steps == 4_000
    # an explicit training block wins
    assert RunConfig(scale="smoke", training={"max_epochs": 9}).training.max_epochs == 9


def test_steps_override_the_preset():
    assert RunConfig(scale=ScalePreset.FULL, steps=250).total_steps == 250


def test_replicates_follow_the_scale():
    assert RunConfig().replicates == 3
    assert RunConfig(scale="full").replicates == 3
    assert RunConfig(scale="smoke").replicates == 1
    assert RunConfig(scale="desk", replicates=5).replicates == 5


@pytest.mark.parametrize("environments", [["square", "nowhere"], ["square", "missing.json"]])
def test_unknown_layouts_rejected_at_config_time(environments):
    with pytest.raises(ValidationError, match="nowhere|not found"):
        RunConfig(environments=environments)


def test_layout_files_are_accepted(tmp_path):
    path = tmp_path / "corridor.json"
    path.write_text('{"name": "Corridor", "walls": [[0, 20, 40, 20]]}')
    config = RunConfig(environments=["square", str(path)])
    assert environment_key(config.environments[1]) == "corridor"


def test_invalid_layout_file_rejected(tmp_path):
    path = tmp_path / "split.json"
    path.write_text('{"name": "Split", "walls": [[0, 25, 50, 25]]}')
    with pytest.raises(ValidationError, match="disconnected"):
        RunConfig(environments=["square", str(path)])


@pytest.mark.parametrize(
    "overrides",
    [
        {"steps": 0},
        {"replicates": 0},
        {"environments": []},
        {"environments": ["square", "Square"]},
        {"train_environment": "rooms2", "environments": ["square", "rooms1"]},
        {"architectures": ["lstm"]},
        {"seeds": {"init": -1}},
    ],
)
def test_invalid_configs(overrides):
    with pytest.raises(ValidationError):
        RunConfig(**overrides)


def test_hash_ignores_where_and_how_fast():
    base = RunConfig(scale="smoke")
    moved = base.model_copy(update={"output_dir": "elsewhere", "workers": 8})
    assert moved.config_hash() == base.config_hash()
    reseeded = RunConfig(scale="smoke", seeds={"dataset": 11})
    assert reseeded.config_hash() != base.config_hash()


def test_file_round_trip(tmp_path):
    config = RunConfig(scale="smoke", steps=300, architectures=["s", "recurrent-sm"], analysis={"k": 3})
    loaded = RunConfig.from_file(config.to_file(tmp_path / "nested" / "config.json"))
    assert loaded == config
    assert loaded.config_hash() == config.config_hash()


def test_derived_seeds():
    assert derive_seed(5, 1) == derive_seed(5, 1)
    assert len({derive_seed(5), derive_seed(5, 0), derive_seed(5, 1), derive_seed(6, 0)}) == 4
    assert 0 <= derive_seed(2**40, 3) < 2**32


def test_environment_keys():
    assert environment_key("Rooms1") == "rooms1"
    assert environment_key("layouts/Office.json") == "office"
