#!/usr/bin/env python3
"""
JSON model file format.

    {"dim": 2,
     "hamiltonian": {"re": [[...]], "im": [[...]]},
     "channels": [{"rate": 1.0, "operator": {"re": [[...]], "im": [[...]]}}],
     "unraveling": {"betas": [{"re": 0.5, "im": 0.0}], "mixing": null}}

Matrices are row-major lists of rows; "im" may be omitted.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator

from .exceptions import DimensionError
from .model import JumpChannel, LindbladModel, UnravelingSpec

SIGNIFICANT_DIGITS = 15


def format_float(value: float) -> float:
    """Round to 15 significant digits so reruns serialize identically"""
    value = float(value)
    if value == 0.0 or not np.isfinite(value):
        return 0.0 if value == 0.0 else value
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


def complex_to_json(value: complex) -> Dict[str, float]:
    value = complex(value)
    return {"re": format_float(value.real), "im": format_float(value.imag)}


def complex_from_json(value: Union[Dict[str, float], float, complex]) -> complex:
    if isinstance(value, dict):
        return complex(value.get("re", 0.0), value.get("im", 0.0))
    return complex(value)


class ComplexMatrix(BaseModel):
    re: List[List[float]]
    im: Optional[List[List[float]]] = None

    def to_array(self) -> np.ndarray:
        real = np.array(self.re, dtype=float)
        if self.im is None:
            return real.astype(np.complex128)
        imag = np.array(self.im, dtype=float)
        if imag.shape != real.shape:
            raise DimensionError(f"Real part {real.shape} and imaginary part {imag.shape} differ")
        return real + 1j * imag

    @classmethod
    def from_array(cls, array) -> "ComplexMatrix":
        array = np.asarray(array, dtype=np.complex128)
        return cls(
            re=[[format_float(x) for x in row] for row in array.real],
            im=[[format_float(x) for x in row] for row in array.imag],
        )


class ComplexScalar(BaseModel):
    re: float = 0.0
    im: float = 0.0

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


class ChannelFile(BaseModel):
    rate: float = Field(ge=0.0)
    operator: ComplexMatrix


class UnravelingFile(BaseModel):
    betas: List[ComplexScalar] = []
    mixing: Optional[ComplexMatrix] = None

    @field_validator("betas", mode="before")
    @classmethod
    def _coerce_betas(cls, value):
        # plain numbers and "a+bj" strings are accepted as well
        if not isinstance(value, list):
            value = [value]
        return [beta if isinstance(beta, ComplexScalar) else complex_to_json(complex_from_json(beta)) for beta in value]

    def to_spec(self, channels: int) -> UnravelingSpec:
        """A single displacement is broadcast to every channel"""
        betas = [beta.to_complex() for beta in self.betas]
        if len(betas) == 1 and channels > 1:
            betas = betas * channels
        if not betas:
            betas = [0j] * channels
        mixing = self.mixing.to_array() if self.mixing is not None else None
        return UnravelingSpec(betas=betas, mixing=mixing)


class ModelFile(BaseModel):
    dim: int = Field(ge=1)
    hamiltonian: ComplexMatrix
    channels: List[ChannelFile] = []
    unraveling: Optional[UnravelingFile] = None

    def to_model(self) -> LindbladModel:
        hamiltonian = self.hamiltonian.to_array()
        if hamiltonian.shape != (self.dim, self.dim):
            raise DimensionError(f"Hamiltonian shape {hamiltonian.shape} does not match dim={self.dim}")
        return LindbladModel(
            hamiltonian=hamiltonian,
            channels=[JumpChannel(rate=ch.rate, operator=ch.operator.to_array()) for ch in self.channels],
        )

    def to_unraveling(self) -> UnravelingSpec:
        unraveling = self.unraveling or UnravelingFile()
        return unraveling.to_spec(len(self.channels))

    @classmethod
    def from_model(cls, model: LindbladModel, spec: Optional[UnravelingSpec] = None) -> "ModelFile":
        unraveling = None
        if spec is not None:
            unraveling = UnravelingFile(
                betas=list(spec.betas),
                mixing=ComplexMatrix.from_array(spec.mixing) if spec.mixing is not None else None,
            )
        return cls(
            dim=model.dim,
            hamiltonian=ComplexMatrix.from_array(model.hamiltonian),
            channels=[
                ChannelFile(rate=channel.rate, operator=ComplexMatrix.from_array(channel.operator))
                for channel in model.channels
            ],
            unraveling=unraveling,
        )


def load_model_file(path: Union[str, Path]) -> ModelFile:
    with open(path, "r") as f:
        return ModelFile.model_validate(json.load(f))


def save_model_file(model_file: ModelFile, path: Union[str, Path]) -> None:
    with open(path, "w") as f:
        json.dump(model_file.model_dump(), f, indent=2, sort_keys=True)


def to_jsonable(value: Any) -> Any:
    """Recursively convert numpy and complex values to JSON-compatible data"""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return complex_to_json(value)
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return value
