import json

import pytest

import rearrange


@pytest.fixture(scope="module")
def dataset():
    return rearrange.Dataset.generate(rooms_per_category=1, episodes_per_room=2, seed=7)


def test_dataset_shape(dataset):
    assert len(dataset) == 8
    assert dataset.room_ids == ["kitchen_00", "living-room_00", "bathroom_00", "bedroom_00"]
    assert dataset.episode_ids("train")[0] == "kitchen_00__000"
    assert dataset.episode_ids("val") == []
    assert dataset.catalog_hash == rearrange.catalog_digest()


def test_dataset_round_trip(dataset, tmp_path):
    path = tmp_path / "ds.json.gz"
    dataset.save(str(path))
    again = rearrange.Dataset.load(str(path))
    assert again.to_json() == dataset.to_json()
    doc = json.loads(dataset.to_json())
    doc["format_version"] = 42
    with pytest.raises(rearrange.SchemaError):
        rearrange.Dataset.from_json(json.dumps(doc))
    with pytest.raises(rearrange.DatasetError):
        rearrange.Dataset.load(str(tmp_path / "missing.json"))


def test_action_space():
    names = rearrange.action_names()
    assert len(names) == 84
    assert names[-1] == "Done"


def test_box_iou():
    half = [0.5, 0.5, 0.5]
    assert rearrange.box_iou([0, 0, 0], 0.0, half, [0.5, 0, 0], 0.0, half) == pytest.approx(1 / 3, abs=1e-9)


def test_env_noop_episode(dataset):
    env = rearrange.Env(dataset)
    obs = env.reset("kitchen_00__000")
    assert obs["stage"] == "walkthrough"
    _, _, done, _ = env.step("Done")
    assert not done
    _, reward, done, reply = env.step("Done")
    assert done
    assert reward < 0
    assert reply["metrics"]["energy_remaining_prop"] == 1.0
    with pytest.raises(rearrange.ProtocolError) as err:
        env.step("Done")
    assert err.value.code == "no_episode"


def test_env_expert_matches_harness(dataset):
    env = rearrange.Env(dataset, mode="one-phase", allow_expert=True)
    env.reset("bedroom_00__001")
    for _ in range(600):
        _, _, done, reply = env.step(env.expert_action())
        if done:
            break
    assert done
    result = rearrange.run(dataset, split="train", agent="expert", mode="one-phase")
    rows = result["csv"].splitlines()
    assert len(rows) == 9
    row = next(r.split(",") for r in rows if r.startswith("bedroom_00__001,"))
    assert int(row[4]) == reply["metrics"]["success"]
    assert int(row[7]) == reply["metrics"]["num_changed"]
    assert json.loads(rearrange.csv_summary(result["csv"])) == json.loads(result["summary"])
