import json

import numpy as np
import pytest

from nongauss import StateValidationError, load_state, make_fock, make_thermal, save_state


def test_round_trip(tmp_path):
    state = make_thermal(0.8, 20)
    path = tmp_path / "thermal.json"
    save_state(state, path, metadata={"family": "thermal", "n_t": 0.8})
    loaded, meta = load_state(path)
    assert loaded.cutoffs == state.cutoffs
    assert np.abs(loaded.matrix - state.matrix).max() < 1e-15
    assert meta["family"] == "thermal"


def test_round_trip_two_modes(tmp_path):
    from nongauss import make_bell_like

    state = make_bell_like("phi", 0.4)
    path = tmp_path / "bell.json"
    save_state(state, path)
    loaded, _ = load_state(path)
    assert loaded.cutoffs == (2, 2)
    assert np.abs(loaded.matrix - state.matrix).max() < 1e-15


def _write(tmp_path, doc):
    path = tmp_path / "state.json"
    path.write_text(json.dumps(doc))
    return path


def _valid_doc():
    m = make_fock(1, 2).matrix
    return {
        "version": 1,
        "modes": 1,
        "cutoffs": [2],
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
        "metadata": {},
    }


def test_bad_trace_rejected(tmp_path):
    doc = _valid_doc()
    doc["matrix"][1][1] = [0.9, 0.0]
    with pytest.raises(StateValidationError):
        load_state(_write(tmp_path, doc))


def test_non_hermitian_rejected(tmp_path):
    doc = _valid_doc()
    doc["matrix"][0][1] = [0.5, 0.0]
    with pytest.raises(StateValidationError):
        load_state(_write(tmp_path, doc))


def test_negative_eigenvalue_rejected(tmp_path):
    doc = _valid_doc()
    doc["matrix"][0][0] = [0.5, 0.0]
    doc["matrix"][1][1] = [1.1, 0.0]
    doc["matrix"][0][1] = [0.6, 0.0]
    doc["matrix"][1][0] = [0.6, 0.0]
    with pytest.raises(StateValidationError):
        load_state(_write(tmp_path, doc))


def test_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(StateValidationError):
        load_state(path)


def test_wrong_side(tmp_path):
    doc = _valid_doc()
    doc["cutoffs"] = [3]
    with pytest.raises(StateValidationError):
        load_state(_write(tmp_path, doc))


def test_missing_field(tmp_path):
    doc = _valid_doc()
    del doc["cutoffs"]
    with pytest.raises(StateValidationError):
        load_state(_write(tmp_path, doc))


def test_unsupported_version(tmp_path):
    doc = _valid_doc()
    doc["version"] = 99
    with pytest.raises(StateValidationError):
        load_state(_write(tmp_path, doc))


def test_bad_entry_shape(tmp_path):
    doc = _valid_doc()
    doc["matrix"][0][0] = [1.0]
    with pytest.raises(StateValidationError):
        load_state(_write(tmp_path, doc))
