from enum import Enum
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from config import DEFAULT_NODE_LIMIT, DEFAULT_THREADS, MAX_DIMENSION


class SearchMode(str, Enum):
    subset = "subset"
    exact = "exact"


class SearchConfig(BaseModel):
    k: int = Field(3, ge=3)
    bound: int = Field(2, ge=0)
    mode: SearchMode = SearchMode.exact
    node_limit: int = Field(DEFAULT_NODE_LIMIT, ge=1)
    threads: int = Field(DEFAULT_THREADS, ge=1)


# Input files

class SetFile(BaseModel):
    n: int = Field(ge=1, le=MAX_DIMENSION)
    elements: List[List[int]]

class WitnessCell(BaseModel):
    cell: List[int]
    shift: List[int]

class WitnessFile(BaseModel):
    n: int = Field(ge=1, le=MAX_DIMENSION)
    k: int = Field(ge=3)
    cells: List[WitnessCell]

class GeneratorSpecFile(BaseModel):
    a_list: List[List[int]] = Field(min_length=1)
    b_list: List[List[int]] = Field(min_length=1)
    signs: List[List[Literal["+", "-"]]]
    u: Optional[List[int]] = None  # target basis for the general construction
    v: Optional[List[int]] = None

class CertificatePiece(BaseModel):
    S: List[List[int]]
    Delta: List[List[int]]

class CertificateFile(BaseModel):
    mode: Literal["theorem53", "conjecture54"]
    pieces: List[CertificatePiece]
    conjectural: bool = False


# Reports

class NecessaryCondition(BaseModel):
    name: str
    passed: bool
    detail: str

class NecessaryReport(BaseModel):
    verdict: Literal["Achievable", "NotAchievable", "Inconclusive"]
    conditions: List[NecessaryCondition]

class FrontierEntry(BaseModel):
    k: int
    bound: int
    outcome: Literal["exhausted", "node_limit", "resolution_cap"]
    nodes: int = 0

class Verdict(BaseModel):
    verdict: Literal["Achieved", "RefutedNecessary", "RefutedObstruction", "Unknown"]
    mode: SearchMode
    k: Optional[int] = None
    witness: Optional[WitnessFile] = None
    reason: Optional[str] = None
    certificate: Optional[CertificateFile] = None
    conjectural_certificate: Optional[CertificateFile] = None
    frontier: List[FrontierEntry] = []
    necessary: NecessaryReport
    seed: Optional[int] = None

class SearchReport(BaseModel):
    found: bool
    k: int
    bound: int
    mode: SearchMode
    witness: Optional[WitnessFile] = None
    node_limit_reached: bool = False
    seed: Optional[int] = None

class CatalogRecord(BaseModel):
    set: List[List[int]]
    witness: WitnessFile

class CatalogReport(BaseModel):
    n: int
    k: int
    bound: int
    partial: bool
    nodes: int
    admitted: int
    records: List[CatalogRecord]
    seed: Optional[int] = None

class IdealReport(BaseModel):
    n: int
    k: int
    classes: List[List[List[int]]]
    ranks: List[int]
    order: List[List[int]]
    observed: List[int]
    maximal: List[int]
    rank_counts: Dict[str, int]
    seed: Optional[int] = None

class CycleEntry(BaseModel):
    vertices: List[List[int]]
    winding: List[int]
    embedded: bool

class CycleReport(BaseModel):
    k: int
    max_len: int
    count: int
    cycles: List[CycleEntry]
    seed: Optional[int] = None

class AchievedReport(BaseModel):
    n: int
    k: int
    achieved_set: List[List[int]]
    target: Optional[List[List[int]]] = None
    mode: Optional[SearchMode] = None
    achieves_target: Optional[bool] = None
    seed: Optional[int] = None

class ConstructionReport(BaseModel):
    k: int
    target: List[List[int]]
    achieved_set: List[List[int]]
    witness: WitnessFile
    seed: Optional[int] = None

class GeneralConstructionReport(BaseModel):
    matrix: List[List[int]]
    achieved_set_of_target: List[List[int]]
    witness_for_pullback: WitnessFile
    pullback: ConstructionReport
    reasoning: str
    seed: Optional[int] = None

class AnalysisReport(BaseModel):
    n: int
    set: List[List[int]]
    pairs: List[List[int]]
    graph_edges: List[List[int]]
    components: List[List[List[int]]]
    hnf_basis: List[List[int]]
    quotient: str
    necessary: NecessaryReport
    certificate: Optional[CertificateFile] = None
    conjectural_certificate: Optional[CertificateFile] = None
    seed: Optional[int] = None

class RenderOptions(BaseModel):
    cell_size: float = Field(40.0, gt=0)
    show_grid: bool = True
    show_labels: bool = False
