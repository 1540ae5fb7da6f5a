import json

import pytest
from fastapi.testclient import TestClient

from alignui import dataset as ds
from alignui.config import ServiceConfig
from alignui.gateway import Gateway, MockProvider
from alignui.service import create_app

from conftest import reasoning_response


def make_app(tmp_path, dataset=None, script=(), offline=True, **config_kwargs):
    provider = MockProvider(list(script))
    gateway = Gateway(provider=provider, sleeper=lambda _: None)
    config = ServiceConfig(
        selections_path=str(tmp_path / "selections.jsonl"),
        offline=offline,
        n_runs=2,
        **config_kwargs,
    )
    app = create_app(config, gateway=gateway, base_dataset=dataset)
    return app, provider, config


@pytest.fixture()
def offline_client(tmp_path, full_dataset):
    app, provider, config = make_app(tmp_path, dataset=full_dataset)
    return TestClient(app), provider, config


def read_log(config):
    path = config.selections_path
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return [json.loads(line) for line in handle if line.strip()]
    except FileNotFoundError:
        return []


# --- /v1/generate -----------------------------------------------------------------


def test_generate_offline_lightness_explorability(offline_client):
    client, _, _ = offline_client
    reply = client.post(
        "/v1/generate",
        json={"task": "adjust the image lightness", "aspects": ["explorability"]},
    )
    assert reply.status_code == 200
    body = reply.json()
    ranked = body["recommendation"]["per_aspect"]["explorability"]
    assert ranked[0]["kind"] == "slider"
    assert sum(entry["score"] for entry in ranked) == 10
    assert body["recommendation"]["n_runs"] == 0
    assert body["specs"], "abstract specs accompany the recommendation"
    kinds = {spec["kind"] for spec in body["specs"]}
    assert "slider" in kinds


def test_generate_withoutpref_prompt_has_no_dataset_section(tmp_path, full_dataset):
    script = [reasoning_response({"efficiency": [("Slider", "quick")]})]
    app, provider, _ = make_app(tmp_path, dataset=full_dataset, script=script, offline=False)
    client = TestClient(app)
    reply = client.post(
        "/v1/generate",
        json={
            "task": "adjust the tint",
            "aspects": ["efficiency"],
            "condition": "withoutpref",
            "runs": 1,
        },
    )
    assert reply.status_code == 200
    (request,) = provider.requests
    assert "dataset" not in (request.system_prompt + request.user_prompt).lower()


def test_generate_grounded_prompt_embeds_dataset(tmp_path, full_dataset):
    script = [reasoning_response({"efficiency": [("Slider", "quick")]})]
    app, provider, _ = make_app(tmp_path, dataset=full_dataset, script=script, offline=False)
    client = TestClient(app)
    reply = client.post(
        "/v1/generate",
        json={
            "task": "adjust the tint",
            "aspects": ["efficiency"],
            "condition": "withpref30",
            "runs": 1,
        },
    )
    assert reply.status_code == 200
    (request,) = provider.requests
    assert "image_adjust_hue" in request.user_prompt


def test_generate_condition_subsets_share_startup_materialization(tmp_path, full_dataset):
    script = [
        reasoning_response({"efficiency": [("Slider", "a")]}),
        reasoning_response({"efficiency": [("Slider", "b")]}),
    ]
    app, provider, _ = make_app(tmp_path, dataset=full_dataset, script=script, offline=False)
    client = TestClient(app)
    for _ in range(2):
        reply = client.post(
            "/v1/generate",
            json={
                "task": "adjust tint",
                "aspects": ["efficiency"],
                "condition": "withpref10",
                "runs": 1,
            },
        )
        assert reply.status_code == 200
    first, second = provider.requests
    assert first.user_prompt == second.user_prompt  # same materialized subset


def test_generate_empty_aspects_is_400(offline_client):
    client, _, _ = offline_client
    reply = client.post("/v1/generate", json={"task": "x", "aspects": []})
    assert reply.status_code == 400


def test_generate_unknown_aspect_is_422(offline_client):
    client, _, _ = offline_client
    reply = client.post("/v1/generate", json={"task": "x", "aspects": ["speed"]})
    assert reply.status_code == 422


def test_generate_gateway_exhaustion_is_503(tmp_path, full_dataset):
    app, _, _ = make_app(tmp_path, dataset=full_dataset, script=["junk"] * 4, offline=False)
    client = TestClient(app)
    reply = client.post(
        "/v1/generate",
        json={"task": "adjust tint", "aspects": ["efficiency"], "runs": 2},
    )
    assert reply.status_code == 503


def test_generate_zero_network_operations(offline_client):
    client, provider, _ = offline_client
    client.post(
        "/v1/generate",
        json={"task": "adjust the image lightness", "aspects": ["efficiency"]},
    )
    assert provider.network_ops == 0


# --- /v1/preferences ----------------------------------------------------------------


def test_preference_vote_increments_summary(offline_client):
    client, _, config = offline_client
    before = client.get("/v1/dataset/summary").json()["total_pieces"]
    reply = client.post(
        "/v1/preferences",
        json={
            "participant": "u1",
            "task": "image_adjust_hue",
            "aspect": "efficiency",
            "kind": "slider",
            "reason": "fast",
        },
    )
    assert reply.status_code == 201
    after = client.get("/v1/dataset/summary").json()["total_pieces"]
    assert after == before + 1
    lines = read_log(config)
    assert len(lines) == 1
    assert lines[0]["kind"] == "slider" and lines[0]["reason"] == "fast"


def test_preference_vote_unknown_kind_is_422(offline_client):
    client, _, config = offline_client
    reply = client.post(
        "/v1/preferences",
        json={
            "participant": "u1",
            "task": "image_adjust_hue",
            "aspect": "efficiency",
            "kind": "knob",
        },
    )
    assert reply.status_code == 422
    assert read_log(config) == []


def test_two_votes_increment_total_by_two(offline_client):
    client, _, _ = offline_client
    before = client.get("/v1/dataset/summary").json()["total_pieces"]
    for kind in ("slider", "color_wheel"):
        assert (
            client.post(
                "/v1/preferences",
                json={
                    "participant": "u2",
                    "task": "image_adjust_hue",
                    "aspect": "explorability",
                    "kind": kind,
                },
            ).status_code
            == 201
        )
    after = client.get("/v1/dataset/summary").json()["total_pieces"]
    assert after == before + 2


def test_log_is_append_only(offline_client):
    client, _, config = offline_client
    vote = {
        "participant": "u3",
        "task": "image_adjust_hue",
        "aspect": "efficiency",
        "kind": "slider",
    }
    client.post("/v1/preferences", json=vote)
    with open(config.selections_path, "rb") as handle:
        prefix = handle.read()
    client.post(
        "/v1/preferences", json={**vote, "participant": "u4", "kind": "color_wheel"}
    )
    with open(config.selections_path, "rb") as handle:
        blob = handle.read()
    assert blob.startswith(prefix)
    assert len(blob) > len(prefix)


# --- tasks and summary -----------------------------------------------------------------


def test_tasks_lists_dataset_and_evaluation_entries(offline_client):
    client, _, _ = offline_client
    body = client.get("/v1/tasks").json()
    dataset_names = {task["name"] for task in body["dataset_tasks"]}
    eval_names = {task["name"] for task in body["evaluation_tasks"]}
    assert "image_adjust_lightness" in dataset_names
    assert len(eval_names) == 6
    assert "image_adjust_tint" in eval_names


def test_summary_total_matches_pilot_oracle(tmp_path, pilot_dataset):
    app, _, _ = make_app(tmp_path, dataset=pilot_dataset)
    client = TestClient(app)
    body = client.get("/v1/dataset/summary").json()
    assert body["total_pieces"] == 90
    assert body["total_pieces"] == ds.total_pieces(pilot_dataset)
    assert len(body["cells"]) == 9


# --- experiment endpoints -----------------------------------------------------------------


def test_assignment_is_stable_per_participant(offline_client):
    client, _, _ = offline_client
    first = client.get("/v1/experiment/assignment", params={"participant": "alice"}).json()
    second = client.get("/v1/experiment/assignment", params={"participant": "alice"}).json()
    assert first == second
    assert len(first["items"]) == 18


def test_selection_requires_issued_assignment(offline_client):
    client, _, _ = offline_client
    reply = client.post(
        "/v1/experiment/selection",
        json={
            "participant": "ghost",
            "task": "image_adjust_tint",
            "aspect": "efficiency",
            "left": "withpref30",
            "right": "withoutpref",
            "chosen": "withpref30",
        },
    )
    assert reply.status_code == 404


def test_selection_round_trip_and_conflicts(offline_client):
    client, _, config = offline_client
    assignment = client.get(
        "/v1/experiment/assignment", params={"participant": "bob"}
    ).json()
    item = assignment["items"][0]
    vote = {
        "participant": "bob",
        "task": item["task"],
        "aspect": item["aspect"],
        "left": item["pair"][0],
        "right": item["pair"][1],
        "chosen": item["pair"][0],
    }
    # chosen outside the pair -> 409
    other = next(
        c
        for c in ("withpref10", "withpref25", "withpref30", "withoutpref")
        if c not in item["pair"]
    )
    conflict = client.post("/v1/experiment/selection", json={**vote, "chosen": other})
    assert conflict.status_code == 409

    ok = client.post("/v1/experiment/selection", json=vote)
    assert ok.status_code == 201
    lines = [line for line in read_log(config) if "chosen" in line]
    assert len(lines) == 1
    assert lines[0]["chosen"] == vote["chosen"]

    duplicate = client.post("/v1/experiment/selection", json=vote)
    assert duplicate.status_code == 409


def test_selection_not_in_assignment_is_409(offline_client):
    client, _, _ = offline_client
    assignment = client.get(
        "/v1/experiment/assignment", params={"participant": "carol"}
    ).json()
    assigned_tasks = {item["task"] for item in assignment["items"]}
    foreign_task = next(
        name
        for name in (
            "image_adjust_exposure",
            "image_adjust_tint",
        )
        if name not in assigned_tasks
    )
    reply = client.post(
        "/v1/experiment/selection",
        json={
            "participant": "carol",
            "task": foreign_task,
            "aspect": "efficiency",
            "left": "withpref30",
            "right": "withoutpref",
            "chosen": "withpref30",
        },
    )
    assert reply.status_code == 409


def test_response_shapes_over_fuzzed_valid_requests(offline_client):
    import random

    client, _, _ = offline_client
    rng = random.Random(808)
    aspects = ["predictability", "efficiency", "explorability"]
    kinds = ["slider", "text_field", "preset_buttons", "color_wheel"]
    tasks = ["image_adjust_hue", "image_adjust_lightness", "image_adjust_color_balance"]
    for _ in range(25):
        body = {
            "task": rng.choice(tasks),
            "aspects": rng.sample(aspects, rng.randint(1, 3)),
        }
        reply = client.post("/v1/generate", json=body)
        assert reply.status_code == 200
        doc = reply.json()
        assert set(doc) >= {"recommendation", "specs"}
        rec = doc["recommendation"]
        assert set(rec) == {"task", "n_runs", "per_aspect"}
        for aspect, entries in rec["per_aspect"].items():
            assert aspect in aspects
            for entry in entries:
                assert set(entry) == {"kind", "weight", "score", "rationale"}
        for spec in doc["specs"]:
            assert set(spec) >= {"kind", "label", "parameter", "value_domain"}

        vote = {
            "participant": f"f{rng.randint(0, 5)}",
            "task": rng.choice(tasks),
            "aspect": rng.choice(aspects),
            "kind": rng.choice(kinds),
        }
        reply = client.post("/v1/preferences", json=vote)
        assert reply.status_code == 201
        assert set(reply.json()) == {"status", "total_pieces"}


def test_restart_replays_log_into_snapshot(tmp_path, full_dataset):
    app, _, config = make_app(tmp_path, dataset=full_dataset)
    client = TestClient(app)
    client.post(
        "/v1/preferences",
        json={
            "participant": "u9",
            "task": "image_adjust_hue",
            "aspect": "efficiency",
            "kind": "slider",
        },
    )
    total = client.get("/v1/dataset/summary").json()["total_pieces"]

    fresh_app = create_app(
        ServiceConfig(selections_path=config.selections_path, offline=True),
        gateway=Gateway(provider=MockProvider([]), sleeper=lambda _: None),
        base_dataset=full_dataset,
    )
    fresh = TestClient(fresh_app)
    assert fresh.get("/v1/dataset/summary").json()["total_pieces"] == total
