import json

import numpy as np
import pytest
from PIL import Image


def make_workspace(root, n_image=3, n_feature=3, size=(24, 20), seed=0):
    """Write source/styled pairs and a JSON-lines manifest under ``root``."""
    rng = np.random.default_rng(seed)
    lines = ["# generated test manifest"]
    for i in range(n_image):
        for tag in ("src", "sty"):
            px = rng.integers(0, 256, size=size + (3,), dtype=np.uint8)
            Image.fromarray(px).save(root / f"img{i}_{tag}.png")
        lines.append(json.dumps({"mode": "image", "source": f"img{i}_src.png",
                                 "styled": f"img{i}_sty.png", "output": f"out/img{i}.png"}))
    for i in range(n_feature):
        np.save(root / f"feat{i}_src.npy", rng.normal(size=(16, 6, 6)).astype(np.float32))
        np.save(root / f"feat{i}_sty.npy", rng.normal(1.0, 2.0, size=(1, 16, 5, 7)))
        lines.append(json.dumps({"mode": "feature", "source": f"feat{i}_src.npy",
                                 "styled": f"feat{i}_sty.npy", "output": f"out/feat{i}.npy"}))
    manifest = root / "manifest.jsonl"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest


def output_bytes(root):
    return {p.name: p.read_bytes() for p in sorted((root / "out").iterdir())}


def strip_timing(report: dict) -> dict:
    report = json.loads(json.dumps(report))
    report["summary"].pop("wall_time_s", None)
    report["summary"].pop("n_slow", None)
    for rec in report["entries"]:
        rec.pop("wall_time_s", None)
        rec.pop("slow", None)
    return report


@pytest.fixture
def workspace(tmp_path):
    return make_workspace(tmp_path)


# nodeid -> [number, title, status] for tests marked as acceptance criteria
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _CRITERIA[item.nodeid] = [mark.args[0], mark.args[1], "NOT RUN"]


def pytest_runtest_logreport(report):
    entry = _CRITERIA.get(report.nodeid)
    if entry is None:
        return
    if report.failed:
        entry[2] = "FAIL"
    elif report.when == "call" and entry[2] != "FAIL":
        entry[2] = "PASS" if report.passed else "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, status in sorted(_CRITERIA.values()):
        terminalreporter.write_line(f"criterion {n:2d} {status:7s} {title}")
