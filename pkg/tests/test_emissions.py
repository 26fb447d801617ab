import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.append(str(ROOT / "src"))

import numpy as np
import pytest
from pydantic import ValidationError
from returns.io import IOFailure, IOSuccess
from returns.unsafe import unsafe_perform_io

from lfspeech.emissions import MAGIC, EmissionMatrix, encode_binary, read_emissions, write_emissions
from lfspeech.errors import MalformedEmissions


def _matrix() -> EmissionMatrix:
    probs = np.array([[0.1, 0.8, 0.1], [0.1, 0.1, 0.8], [0.8, 0.1, 0.1]])
    return EmissionMatrix(log_probs=np.log(probs), frame_duration=0.04, blank_id=0, normalized=True)


def test_binary_file(tmp_path):
    matrix = _matrix()
    path = tmp_path / "rec.ctce"
    assert write_emissions(matrix, path) == IOSuccess(path)
    assert path.read_bytes()[:4] == MAGIC

    back = unsafe_perform_io(read_emissions(path).unwrap())
    assert back.log_probs.shape == (3, 3)
    assert np.allclose(back.log_probs, matrix.log_probs, atol=1e-6)
    assert (back.frame_duration, back.blank_id, back.normalized) == (0.04, 0, True)
    assert back.duration == pytest.approx(0.12)


def test_text_file(tmp_path):
    path = tmp_path / "rec.txt"
    path.write_text("# blank_id=2 frame_duration=0.01\n-1 -2 -3\n\n-4 -5 -6\n")
    matrix = unsafe_perform_io(read_emissions(path).unwrap())
    assert matrix.log_probs.tolist() == [[-1.0, -2.0, -3.0], [-4.0, -5.0, -6.0]]
    assert (matrix.blank_id, matrix.frame_duration, matrix.normalized) == (2, 0.01, False)

    bare = tmp_path / "bare.txt"
    bare.write_text("-1 -2\n")
    assert unsafe_perform_io(read_emissions(bare, frame_duration=0.025).unwrap()).frame_duration == 0.025

    assert write_emissions(_matrix(), tmp_path / "dump.txt", text=True) == IOSuccess(tmp_path / "dump.txt")
    dumped = unsafe_perform_io(read_emissions(tmp_path / "dump.txt").unwrap())
    assert np.array_equal(dumped.log_probs, _matrix().log_probs)


def test_malformed(tmp_path):
    short = tmp_path / "short.ctce"
    short.write_bytes(MAGIC + b"\x01\x00")
    assert read_emissions(short) == IOFailure(MalformedEmissions(location=6, reason="truncated_header"))

    cut = tmp_path / "cut.ctce"
    cut.write_bytes(encode_binary(_matrix())[:-4])
    assert read_emissions(cut) == IOFailure(MalformedEmissions(location=37 + 32, reason="truncated_data"))

    ragged = tmp_path / "ragged.txt"
    ragged.write_text("-1 -2\n-1 -2 -3\n")
    assert read_emissions(ragged) == IOFailure(MalformedEmissions(location=2, reason="ragged_row"))

    words = tmp_path / "words.txt"
    words.write_text("-1 nope\n")
    assert read_emissions(words) == IOFailure(MalformedEmissions(location=1, reason="non_numeric_value"))

    unnormalized = tmp_path / "unnormalized.txt"
    unnormalized.write_text("# normalized=1\n-0.1 -0.1\n")
    result = read_emissions(unnormalized)
    assert isinstance(result, IOFailure)
    assert unsafe_perform_io(result.failure()).location == 2

    assert isinstance(read_emissions(tmp_path / "missing.ctce"), IOFailure)


def test_matrix_invariants():
    EmissionMatrix(log_probs=[[-np.inf, 0.0]])
    with pytest.raises(ValidationError):
        EmissionMatrix(log_probs=[[np.inf, 0.0]])
    with pytest.raises(ValidationError):
        EmissionMatrix(log_probs=[[0.0]])
    with pytest.raises(ValidationError):
        EmissionMatrix(log_probs=[[0.0, 0.0]], blank_id=2)
    with pytest.raises(ValidationError):
        EmissionMatrix(log_probs=np.zeros((0, 3)))
    with pytest.raises(ValidationError):
        EmissionMatrix(log_probs=[[0.5, -1.0]], normalized=True)
