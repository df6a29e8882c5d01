"""Factoid question answering over a free-text entity graph.

The compiled core returns structured results as JSON text; the helpers
here decode them into plain Python objects.
"""

import json

from ._core import (
    Error,
    FormatError,
    Index,
    Model,
    NumericError,
    ParseError,
    PipelineConfig,
    ShapeError,
    SyntheticSpec,
    Workspace,
    toy_gradcheck,
    write_synthetic,
)
from . import _core

__all__ = [
    "Error",
    "FormatError",
    "Index",
    "Model",
    "NumericError",
    "ParseError",
    "PipelineConfig",
    "ShapeError",
    "SyntheticSpec",
    "Workspace",
    "ground",
    "ground_file",
    "predict",
    "toy_gradcheck",
    "train_and_evaluate",
    "write_synthetic",
]


def ground(workspace, config, text, question_id="q", answer=None, training=False):
    """Grounds one question and returns the evidence graph as a dict."""
    return json.loads(workspace.ground(config, text, question_id, answer, training))


def ground_file(workspace, config, questions_path, training=False):
    """Grounds every question of a questions JSONL file."""
    return [json.loads(g) for g in workspace.ground_file(config, questions_path, training)]


def predict(model, graph):
    """Runs the model on a grounded graph dict and returns its trace."""
    return json.loads(model.predict(json.dumps(graph)))


def train_and_evaluate(train_graphs, test_graphs, config, checkpoint=""):
    """Trains on grounded graph dicts and returns the test metrics dict."""
    return json.loads(
        _core.train_and_evaluate(
            [json.dumps(g) for g in train_graphs],
            [json.dumps(g) for g in test_graphs],
            config,
            checkpoint,
        )
    )
