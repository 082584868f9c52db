import json
import os
import pathlib

import pytest

ROOT = pathlib.Path(os.environ.get("DSCHAT_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))


@pytest.fixture
def root():
    return ROOT


@pytest.fixture
def student(root):
    turns = json.loads((root / "data/transcripts/student_session.turns.json").read_text())
    return {
        "csv": (root / turns["dataset"]).read_text(),
        "utterances": turns["utterances"],
        "script": root / "data/transcripts/student_session.script.jsonl",
        "golden": json.loads((root / "data/transcripts/student_session.golden.json").read_text()),
    }
