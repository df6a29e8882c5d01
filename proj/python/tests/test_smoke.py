import json

import pytest

import ftqa


def small_config():
    return ftqa.PipelineConfig.from_json(
        json.dumps(
            {
                "epochs": 2,
                "learning_rate": 0.01,
                "model": {
                    "embed_dim": 8,
                    "rnn_hidden": 4,
                    "ffn_dim": 8,
                    "mlp_dims": [8],
                    "layers": 2,
                },
            }
        )
    )


def test_toy_gradcheck_passes():
    passed, error = ftqa.toy_gradcheck()
    assert passed
    assert error < 1e-4


def test_index_ranks_by_cosine_then_id():
    index = ftqa.Index(["lantern quay", "quay", "orchard"], ["c", "b", "a"])
    ranked = index.retrieve("quay", 10)
    assert [unit for unit, _ in ranked] == [1, 0]
    assert ranked[0][1] == pytest.approx(1.0)
    assert index.cosine("orchard", "lantern") == 0.0


def test_config_defaults_and_errors():
    config = ftqa.PipelineConfig()
    assert config.top_k_train == 20
    assert config.top_k_eval == 50
    assert json.loads(config.to_json())["model"]["layers"] == 3
    with pytest.raises(ftqa.ParseError):
        ftqa.PipelineConfig.from_json('{"no_such_key": 1}')
    with pytest.raises(ftqa.Error):
        config.enable_ablation("no-such-ablation")
    config.top_k_eval = 0
    with pytest.raises(ftqa.Error, match="--top-k-eval"):
        config.validate()


def test_synthetic_round_trip(tmp_path):
    spec = ftqa.SyntheticSpec()
    spec.entities = 40
    spec.train_questions = 40
    spec.test_questions = 20
    ftqa.write_synthetic(spec, 3, str(tmp_path))

    config = small_config()
    ws = ftqa.Workspace(
        str(tmp_path / "documents.jsonl"), str(tmp_path / "entities.jsonl"), config
    )
    assert ws.node_count == 40
    assert ws.edge_count > 0
    weights = ws.train_scorer(str(tmp_path / "questions.train.jsonl"), config)
    assert len(weights) == 4

    train = ftqa.ground_file(ws, config, str(tmp_path / "questions.train.jsonl"), True)
    test = ftqa.ground_file(ws, config, str(tmp_path / "questions.test.jsonl"))
    assert len(train) == 40 and len(test) == 20
    assert all(len(g["question_entities"]) == 2 for g in test)

    checkpoint = str(tmp_path / "model.ckpt")
    metrics = ftqa.train_and_evaluate(train, test, config, checkpoint)
    assert metrics["evaluated"] == 20
    assert 0.0 <= metrics["accuracy"] <= 1.0

    model = ftqa.Model.load(checkpoint)
    trace = ftqa.predict(model, test[0])
    assert trace["answer"] in test[0]["candidates"]


def test_unlinked_question_is_excluded(tmp_path):
    spec = ftqa.SyntheticSpec()
    spec.entities = 40
    spec.train_questions = 10
    spec.test_questions = 5
    ftqa.write_synthetic(spec, 5, str(tmp_path))
    config = ftqa.PipelineConfig()
    ws = ftqa.Workspace(
        str(tmp_path / "documents.jsonl"), str(tmp_path / "entities.jsonl"), config
    )
    graph = ftqa.ground(ws, config, "Which lighthouse is the tallest?")
    assert graph["flags"]["excluded"]
    assert ws.link("Which lighthouse is the tallest?", 0.1) == []


def test_missing_file_raises():
    with pytest.raises(ftqa.Error):
        ftqa.Workspace("/nonexistent/documents.jsonl", "/nonexistent/entities.jsonl")
