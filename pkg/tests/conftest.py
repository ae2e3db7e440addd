import os
import random

import numpy as np
import pytest

OLID_DIR = os.environ.get("OLID_DIR")

_OFF_WORDS = ["idiot", "stupid", "trash", "liar", "moron", "disgusting", "pathetic", "loser"]
_GRP_WORDS = ["liberals", "democrats", "conservatives", "they", "antifa"]
_NEUTRAL = ["the", "game", "today", "love", "great", "vote", "news", "season", "team", "music",
            "weekend", "coffee", "happy", "friends", "morning", "watch", "new", "policy"]


def synthetic_rows(n=120, seed=0):
    """OLID-shaped rows whose labels are recoverable from the words used."""
    rnd = random.Random(seed)
    rows = []
    for i in range(n):
        words = rnd.sample(_NEUTRAL, 4)
        kind = rnd.random()
        if kind < 0.55:
            labels = ("NOT", "NULL", "NULL")
        elif kind < 0.65:
            words += [rnd.choice(["damn", "hell"])]
            labels = ("OFF", "UNT", "NULL")
        elif kind < 0.85:
            words += [rnd.choice(_OFF_WORDS), "you"]
            labels = ("OFF", "TIN", "IND")
        elif kind < 0.95:
            words += [rnd.choice(_OFF_WORDS), rnd.choice(_GRP_WORDS)]
            labels = ("OFF", "TIN", "GRP")
        else:
            words += [rnd.choice(_OFF_WORDS), "media"]
            labels = ("OFF", "TIN", "OTH")
        rnd.shuffle(words)
        text = "@USER " + " ".join(words) + rnd.choice(["", "!!", " URL", " lol"])
        rows.append((str(10000 + i), text, *labels))
    return rows


def write_olid(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n")
        for r in rows:
            fh.write("\t".join(r) + "\n")
    return path


@pytest.fixture
def olid_file(tmp_path):
    return write_olid(tmp_path / "train.tsv", synthetic_rows())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# Acceptance summary: one PASS/FAIL/SKIP line per criterion marker.
_criteria = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when not in ("setup", "call"):
        return
    number, name = marker.args
    entry = _criteria.setdefault(number, {"name": name, "outcomes": []})
    if call.excinfo is None:
        if call.when == "call":
            entry["outcomes"].append("pass")
    elif call.excinfo.errisinstance(pytest.xfail.Exception):
        entry["outcomes"].append("nonblocking-fail")
    elif call.excinfo.errisinstance(pytest.skip.Exception):
        entry["outcomes"].append("skip")
    else:
        entry["outcomes"].append("fail")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        outs = entry["outcomes"]
        if "fail" in outs:
            status = "FAIL"
        elif "nonblocking-fail" in outs:
            status = "FAIL (non-blocking)"
        elif outs and all(o == "skip" for o in outs):
            status = "SKIP"
        elif "pass" in outs:
            status = "PASS"
        else:
            status = "SKIP"
        terminalreporter.write_line(f"ACCEPTANCE {status}: criterion {number} {entry['name']}")
