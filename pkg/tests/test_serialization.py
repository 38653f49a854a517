#!/usr/bin/env python3
"""
Test suite for the JSON model file format
"""

import json
import os
import shutil
import tempfile

import numpy as np
import pytest
from pydantic import ValidationError

from betadyne.exceptions import DimensionError, HermiticityError
from betadyne.model import JumpChannel, LindbladModel, UnravelingSpec
from betadyne.quantum_core import pauli_x, random_unitary, sigma_minus, sigma_plus
from betadyne.serialization import (
    ComplexMatrix,
    ModelFile,
    UnravelingFile,
    complex_from_json,
    complex_to_json,
    format_float,
    load_model_file,
    save_model_file,
    to_jsonable,
)


@pytest.mark.unit
class TestScalars:
    """Complex numbers and float formatting"""

    def test_format_float_rounds_to_fifteen_digits(self):
        assert format_float(0.1 + 0.2) == 0.3
        assert format_float(-0.0) == 0.0
        assert format_float(float("inf")) == float("inf")

    def test_complex_forms(self):
        assert complex_to_json(1 - 2j) == {"re": 1.0, "im": -2.0}
        assert complex_from_json({"re": 0.5}) == 0.5
        assert complex_from_json(2) == 2
        assert complex_from_json("1+2j") == 1 + 2j

    def test_to_jsonable(self):
        data = {"value": np.complex128(1j), "array": np.arange(3), "flag": np.bool_(True), 4: np.float64(0.25)}
        assert to_jsonable(data) == {"value": {"re": 0.0, "im": 1.0}, "array": [0, 1, 2], "flag": True, "4": 0.25}


@pytest.mark.unit
class TestModelFile:
    """Model files and their conversion to models"""

    def setup_method(self):
        self.temp_dir = tempfile.mkdtemp()

    def teardown_method(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_imaginary_part_optional(self):
        matrix = ComplexMatrix(re=[[1, 2], [3, 4]])
        np.testing.assert_array_equal(matrix.to_array(), [[1, 2], [3, 4]])

    def test_mismatched_parts(self):
        with pytest.raises(DimensionError):
            ComplexMatrix(re=[[1, 0], [0, 1]], im=[[0]]).to_array()

    def test_save_and_load(self):
        model = LindbladModel(
            hamiltonian=0.3 * pauli_x(),
            channels=[JumpChannel(rate=1.0, operator=sigma_minus()), JumpChannel(rate=0.5, operator=sigma_plus())],
        )
        spec = UnravelingSpec(betas=[0.5, -0.2j], mixing=random_unitary(2, np.random.default_rng(1)))
        path = os.path.join(self.temp_dir, "model.json")
        save_model_file(ModelFile.from_model(model, spec), path)
        loaded = load_model_file(path)
        np.testing.assert_allclose(loaded.to_model().hamiltonian, model.hamiltonian)
        assert loaded.to_model().rates == [1.0, 0.5]
        assert loaded.to_unraveling().betas == (0.5, -0.2j)
        np.testing.assert_allclose(loaded.to_unraveling().mixing, spec.mixing, atol=1e-14)

    def test_single_beta_is_broadcast(self):
        spec = UnravelingFile(betas=[{"re": 0.1, "im": 0.2}]).to_spec(3)
        assert spec.betas == (0.1 + 0.2j,) * 3

    def test_missing_betas_default_to_zero(self):
        assert UnravelingFile().to_spec(2).betas == (0j, 0j)

    def test_scalar_beta_accepted(self):
        assert UnravelingFile(betas=0.5).to_spec(1).betas == (0.5,)

    def test_hamiltonian_shape_checked(self):
        model_file = ModelFile(dim=3, hamiltonian=ComplexMatrix(re=[[0, 0], [0, 0]]))
        with pytest.raises(DimensionError):
            model_file.to_model()

    def test_non_hermitian_hamiltonian(self):
        model_file = ModelFile(dim=2, hamiltonian=ComplexMatrix(re=[[0, 1], [0, 0]]))
        with pytest.raises(HermiticityError):
            model_file.to_model()

    def test_negative_rate(self):
        with pytest.raises(ValidationError):
            ModelFile.model_validate({
                "dim": 2,
                "hamiltonian": {"re": [[0, 0], [0, 0]]},
                "channels": [{"rate": -1, "operator": {"re": [[0, 1], [0, 0]]}}],
            })

    def test_saved_file_is_sorted_json(self):
        model = LindbladModel(hamiltonian=np.zeros((2, 2)), channels=[])
        path = os.path.join(self.temp_dir, "model.json")
        save_model_file(ModelFile.from_model(model), path)
        with open(path) as f:
            data = json.load(f)
        assert list(data) == sorted(data)
        assert data["unraveling"] is None
