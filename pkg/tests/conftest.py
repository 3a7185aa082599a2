import json
import pathlib

import pytest

from perimere import parse

FIXTURE_DIR = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def fig3_left_doc():
    """2D graph: two vertices, a plain edge, a diagonal loop, a closing loop."""
    return {
        "dim": 2,
        "basis": [[1.0, 0.0], [0.0, 1.0]],
        "vertices": [{"id": 1, "value": 1.0}, {"id": 2, "value": 3.0}],
        "edges": [
            {"id": 10, "u": 1, "v": 2, "value": 5.0, "shift": [0, 0]},
            {"id": 11, "u": 2, "v": 1, "value": 7.0, "shift": [1, 1]},
            {"id": 12, "u": 2, "v": 1, "value": 9.0, "shift": [0, 1]},
        ],
    }


def helix_cross_doc():
    """3D graph: a grid-forming cross above a double helix plus a vertical line."""
    return {
        "dim": 3,
        "basis": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        "vertices": [{"id": i, "value": float(i)} for i in range(1, 6)],
        "edges": [
            {"id": 6, "u": 2, "v": 2, "value": 6.0, "shift": [1, 1, 0]},
            {"id": 7, "u": 3, "v": 4, "value": 7.0, "shift": [0, 0, 0]},
            {"id": 8, "u": 4, "v": 5, "value": 8.0, "shift": [1, 0, 0]},
            {"id": 9, "u": 5, "v": 3, "value": 9.0, "shift": [1, 0, 0]},
            {"id": 10, "u": 2, "v": 3, "value": 10.0, "shift": [0, 0, 0]},
            {"id": 11, "u": 3, "v": 3, "value": 11.0, "shift": [0, 0, 1]},
            {"id": 12, "u": 1, "v": 2, "value": 12.0, "shift": [0, 0, 0]},
            {"id": 13, "u": 1, "v": 2, "value": 13.0, "shift": [-1, 0, 0]},
        ],
    }


@pytest.fixture
def fig3_left():
    return parse(fig3_left_doc())


@pytest.fixture
def helix_cross():
    return parse(helix_cross_doc())


@pytest.fixture
def fixture_paths(tmp_path):
    """Write both golden graphs to disk for CLI runs."""
    a = tmp_path / "diagonal_loop_2d.json"
    b = tmp_path / "helix_cross_3d.json"
    a.write_text(json.dumps(fig3_left_doc()))
    b.write_text(json.dumps(helix_cross_doc()))
    return a, b
