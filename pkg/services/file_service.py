import json
import os
import sys
from typing import Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from logger import get_logger
from schemas.achieve_schema import (
    CertificateFile,
    CertificatePiece,
    GeneratorSpecFile,
    SetFile,
    WitnessCell,
    WitnessFile,
)
from services.errors import InvalidInput
from services.lattice_service import SymmetricSet, normalize_symmetric
from services.nset_service import DiscreteNSet
from services.structure_service import Decomposition

logger = get_logger(__name__)

Model = TypeVar("Model", bound=BaseModel)


def describe_validation_error(e: ValidationError) -> str:
    first = e.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "<root>"
    return f"{location}: {first['msg']}"


def load_model(path: str, model: Type[Model]) -> Model:
    if not os.path.exists(path):
        raise InvalidInput(f"File '{path}' not found")
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise InvalidInput(f"Cannot read '{path}': {e}")
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        raise InvalidInput(f"{path}: {describe_validation_error(e)}")


def set_from_file(data: SetFile, strict: bool = False) -> SymmetricSet:
    for i, element in enumerate(data.elements):
        if len(element) != data.n:
            raise InvalidInput(f"elements.{i}: expected {data.n} coordinates, got {len(element)}")
    normalized = normalize_symmetric(data.elements, data.n)
    given = {tuple(e) for e in data.elements}
    if given != set(normalized.members):
        if strict:
            raise InvalidInput("Set is not symmetric or misses 0 (rejected by --strict)")
        logger.warning(f"Set was symmetrized: {len(given)} given elements, {len(normalized)} after closure")
    return normalized


def load_set(path: str, strict: bool = False) -> SymmetricSet:
    return set_from_file(load_model(path, SetFile), strict)


def nset_from_file(data: WitnessFile) -> DiscreteNSet:
    mapping = {}
    for i, entry in enumerate(data.cells):
        if len(entry.cell) != data.n:
            raise InvalidInput(f"cells.{i}.cell: expected {data.n} coordinates, got {len(entry.cell)}")
        if len(entry.shift) != data.n:
            raise InvalidInput(f"cells.{i}.shift: expected {data.n} coordinates, got {len(entry.shift)}")
        if any(not 0 <= c < data.k for c in entry.cell):
            raise InvalidInput(f"cells.{i}.cell: {entry.cell} is not a residue modulo {data.k}")
        cell = tuple(entry.cell)
        if cell in mapping:
            raise InvalidInput(f"cells.{i}.cell: {entry.cell} listed twice")
        mapping[cell] = tuple(entry.shift)
    return DiscreteNSet.from_mapping(data.n, data.k, mapping)


def load_witness(path: str) -> DiscreteNSet:
    return nset_from_file(load_model(path, WitnessFile))


def load_spec(path: str) -> GeneratorSpecFile:
    return load_model(path, GeneratorSpecFile)


def load_certificate(path: str) -> CertificateFile:
    return load_model(path, CertificateFile)


def witness_to_schema(K: DiscreteNSet) -> WitnessFile:
    return WitnessFile(
        n=K.n,
        k=K.k,
        cells=[WitnessCell(cell=list(u), shift=list(x)) for u, x in zip(K.cells(), K.shifts)],
    )


def certificate_to_schema(decomposition: Optional[Decomposition]) -> Optional[CertificateFile]:
    if decomposition is None:
        return None
    data = decomposition.to_certificate()
    return CertificateFile(
        mode=data["mode"],
        pieces=[CertificatePiece(**piece) for piece in data["pieces"]],
        conjectural=decomposition.conjectural,
    )


def dump_report(report: BaseModel) -> str:
    return json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def write_report(report: BaseModel, out: Optional[str] = None) -> str:
    """Serialize a report deterministically to ``out`` (stdout when None)."""
    text = dump_report(report)
    write_text(text, out)
    return text


def write_text(text: str, out: Optional[str] = None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        directory = os.path.dirname(out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise InvalidInput(f"Cannot write '{out}': {e}")
    logger.info(f"Wrote {len(text)} bytes to {out}")
