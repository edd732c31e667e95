"""Privacy settings scoring, recommendation and survey analysis."""

import json

from . import _core
from ._core import InsufficientDataError, PrivrecError, p_value, pearson

__all__ = [
    "InsufficientDataError",
    "PrivrecError",
    "analyze",
    "default_schema",
    "filter_satisfied",
    "ingest_csv",
    "p_value",
    "pearson",
    "recommend",
    "score",
    "synth",
]


def _schema_text(schema):
    if schema is None or isinstance(schema, str):
        return schema
    return json.dumps(schema)


def default_schema():
    return json.loads(_core.default_schema())


def score(choices, schema=None):
    """Total privacy score (0..10) of a {setting_id: choice_id} mapping."""
    return _core.score(json.dumps(choices), _schema_text(schema))


def synth(seed=42, n=451, reference=False, dissatisfied=0.155, plants=(), schema=None):
    """Returns (snapshot_text, warnings)."""
    return _core.synth(seed, n, reference, dissatisfied, list(plants), _schema_text(schema))


def ingest_csv(text, schema=None):
    """Returns (snapshot_text, [(row, reason), ...])."""
    return _core.ingest_csv(text, _schema_text(schema))


def filter_satisfied(snapshot, threshold=0, schema=None):
    return _core.filter_satisfied(snapshot, threshold, _schema_text(schema))


def recommend(snapshot, intake, mode="knn", k=18, threshold=0, show_neighbors=False, schema=None):
    doc = _core.recommend(snapshot, json.dumps(intake), mode, k, threshold, show_neighbors, _schema_text(schema))
    return json.loads(doc)


def analyze(snapshot, schema=None):
    return json.loads(_core.analyze(snapshot, _schema_text(schema)))
