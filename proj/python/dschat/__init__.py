"""Conversational data-science assistant engine: dialogue, PeTEL, filtering and training dispatch."""

import json
import os

from . import _native
from ._native import DschatError, allowed_next, normalize_state, states

__all__ = [
    "Assistant",
    "DschatError",
    "allowed_next",
    "extract_json",
    "normalize_state",
    "parse_petel",
    "petel_progress",
    "replay",
    "run_petel",
    "serialize_petel",
    "states",
]


def _petel_text(petel):
    return petel if isinstance(petel, str) else json.dumps(petel)


def extract_json(text):
    """First JSON object embedded in text, as a dict."""
    return json.loads(_native.extract_json(text))


def parse_petel(petel):
    """Validates a PeTEL (relaxed text or dict) and returns it as a dict in schema order."""
    return json.loads(_native.parse_petel(_petel_text(petel)))


def serialize_petel(petel):
    return _native.serialize_petel(_petel_text(petel))


def petel_progress(petel):
    """{"filled": [...], "missing": [...]} slot names."""
    return json.loads(_native.petel_progress(_petel_text(petel)))


def replay(log):
    """Replays an event log; the result carries the session record, trajectory and violations."""
    return json.loads(_native.replay(os.fspath(log)))


def run_petel(petel, csv, backend="builtin", seed=0):
    """Filters, prepares and trains one PeTEL against CSV text."""
    return json.loads(_native.run_petel(_petel_text(petel), csv, backend, seed))


class Assistant:
    """Session manager over a scripted or HTTP provider.

    Keyword arguments are service config keys (script, script_strict, backend, teler_level,
    seed, data_dir, llm, ...). Without data_dir sessions live in memory only.
    """

    def __init__(self, **config):
        for key in ("script", "data_dir"):
            if config.get(key) is not None:
                config[key] = os.fspath(config[key])
        self._native = _native.Assistant(json.dumps(config))

    def create_session(self):
        return self._native.create()

    def upload(self, session_id, csv, name="dataset"):
        return json.loads(self._native.upload(session_id, csv, name))

    def send(self, session_id, text):
        return json.loads(self._native.post(session_id, text))

    def session(self, session_id):
        return json.loads(self._native.session(session_id))

    def snapshot(self, session_id):
        return json.loads(self._native.snapshot(session_id))

    def results(self, session_id):
        return json.loads(self._native.results(session_id))

    def session_ids(self):
        return list(self._native.ids())

    def log_path(self, session_id):
        return self._native.log_path(session_id)

    def restore(self, log):
        return self._native.restore(os.fspath(log))
