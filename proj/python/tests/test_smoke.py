import pytest

import dschat



def test_extract_json():
    assert dschat.extract_json('Sure: {"intent": "chitchat", "n": [1, 2]} done') == {"intent": "chitchat", "n": [1, 2]}
    with pytest.raises(dschat.DschatError) as e:
        dschat.extract_json("no structure here")
    assert e.value.code == "NoJsonFound"
    assert e.value.category == "validation"


def test_states_and_whitelist():
    assert dschat.states() == ["data_visualization", "task_selection", "task_formulation", "model_training"]
    assert dschat.normalize_state("dataset_understanding") == "data_visualization"
    assert dschat.normalize_state("result_summary") is None
    assert dschat.allowed_next("task_formulation") == ["task_formulation", "model_training"]
    with pytest.raises(dschat.DschatError):
        dschat.allowed_next("nowhere")


def test_petel_round_trip():
    p = dschat.parse_petel("{problem_type: classification, target_variable: final_grade}")
    assert p["problem_type"] == "classification"
    assert dschat.parse_petel(p) == p
    assert dschat.parse_petel(dschat.serialize_petel(p)) == p
    progress = dschat.petel_progress(p)
    assert "target_variable" in progress["filled"]
    assert "features" in progress["missing"]
    with pytest.raises(dschat.DschatError) as e:
        dschat.parse_petel("{problem_type: classification, colour: blue}")
    assert e.value.category == "validation"


def test_run_petel_baseline(root):
    csv = (root / "data/fixtures/baseline8.csv").read_text()
    petel = (
        "{problem_type: classification, target_variable: label, features: [hours, score], dataset_size: Default, "
        "performance_metrics: [accuracy], validation_method: cross_validation, "
        "classification_methods: [logistic_regression]}"
    )
    out = dschat.run_petel(petel, csv)
    assert out["rows"] == 8
    assert out["results"]["recommended"] == "majority_class_baseline"
    row = next(r for r in out["results"]["rows"] if r["method"] == "majority_class_baseline")
    assert row["metrics"]["accuracy"] == 0.625


def test_replay_bundled_log(root, student):
    r = dschat.replay(root / "data/transcripts/student_session_log/28e837c5cb41dc3e.jsonl")
    assert r["ok"]
    assert r["trajectory"] == dschat.states()
    assert r["session"]["state"] == "model_training"
    assert dschat.parse_petel(r["session"]["petel"]) == dschat.parse_petel(student["golden"])


def test_student_session(student, tmp_path):
    a = dschat.Assistant(script=student["script"], script_strict=True, data_dir=tmp_path)
    sid = a.create_session()
    up = a.upload(sid, student["csv"], "student_performance")
    assert "classification" in up["reply"]
    seen = []
    for u in student["utterances"]:
        seen.append(a.send(sid, u)["state"])
    assert seen[0] == "task_selection"
    assert seen[-1] == "model_training"
    rec = a.session(sid)
    assert rec["turn_count"] == len(student["utterances"])
    assert dschat.parse_petel(rec["petel"]) == dschat.parse_petel(student["golden"])
    assert a.results(sid)["recommended"] == "majority_class_baseline"
    assert dschat.replay(a.log_path(sid))["ok"]


def test_assistant_errors(student):
    a = dschat.Assistant(script=student["script"])
    with pytest.raises(dschat.DschatError) as e:
        a.send("missing", "hello")
    assert e.value.category == "not_found"
    sid = a.create_session()
    with pytest.raises(dschat.DschatError) as e:
        a.results(sid)
    assert e.value.code == "NoResults"
    with pytest.raises(dschat.DschatError) as e:
        dschat.Assistant(bogus=1)
    assert e.value.category == "validation"
