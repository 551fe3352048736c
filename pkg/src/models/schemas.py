"""
JSON models for matrices, triples, maps, witnesses, Kraus sets and verdicts
"""
import json
import math
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config.parameters import JSON_INDENT
from src.core.cones import CertificateReport, TcpWitness
from src.core.docmaps import CovariantMap, KrausSet
from src.core.ldoi import InvariantClass, MatrixTriple
from src.core.matcore import diag_part


class MatrixModel(BaseModel):
    """Row-major complex matrix: data holds [re, im] pairs"""
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    data: List[List[float]]

    @model_validator(mode="after")
    def _check_entries(self) -> "MatrixModel":
        if len(self.data) != self.rows * self.cols:
            raise ValueError(f"Matrix data has {len(self.data)} entries, expected {self.rows * self.cols}")
        for pair in self.data:
            if len(pair) != 2:
                raise ValueError("Matrix entries must be [re, im] pairs")
            if not all(math.isfinite(x) for x in pair):
                raise ValueError("Matrix entries must be finite")
        return self

    @classmethod
    def from_numpy(cls, M) -> "MatrixModel":
        M = np.asarray(M, dtype=complex)
        if M.ndim != 2:
            raise ValueError(f"Expected a matrix, got shape {M.shape}")
        flat = M.reshape(-1)
        return cls(rows=M.shape[0], cols=M.shape[1],
                   data=[[float(z.real), float(z.imag)] for z in flat])

    def to_numpy(self) -> np.ndarray:
        arr = np.array([complex(re, im) for re, im in self.data], dtype=complex)
        return arr.reshape(self.rows, self.cols)


class TripleModel(BaseModel):
    """(A, B, C); a missing B or C is taken as diag A"""
    model_config = ConfigDict(populate_by_name=True)

    A: MatrixModel
    B: Optional[MatrixModel] = None
    C: Optional[MatrixModel] = None
    klass: Optional[str] = Field(default=None, alias="class")

    @classmethod
    def from_triple(cls, t: MatrixTriple, klass: Optional[InvariantClass] = None) -> "TripleModel":
        return cls(
            A=MatrixModel.from_numpy(t.A),
            B=MatrixModel.from_numpy(t.B),
            C=MatrixModel.from_numpy(t.C),
            klass=klass.value if klass else None,
        )

    def to_triple(self) -> MatrixTriple:
        A = self.A.to_numpy()
        D = diag_part(A)
        B = self.B.to_numpy() if self.B is not None else D
        C = self.C.to_numpy() if self.C is not None else D
        t = MatrixTriple(A, B, C)
        if self.klass is not None:
            t = t.promote(InvariantClass.parse(self.klass))
        return t


class MapModel(BaseModel):
    """Covariant map: class is DUC, CDUC or DOC (matrix class names are accepted)"""
    model_config = ConfigDict(populate_by_name=True)

    klass: str = Field(alias="class")
    triple: TripleModel

    @classmethod
    def from_map(cls, m: CovariantMap) -> "MapModel":
        return cls(klass=m.map_name, triple=TripleModel.from_triple(m.triple))

    def to_map(self) -> CovariantMap:
        klass = InvariantClass.parse(self.klass)
        return CovariantMap(klass, self.triple.to_triple().promote(klass))


class WitnessModel(BaseModel):
    V: MatrixModel
    W: MatrixModel

    @classmethod
    def from_witness(cls, w: TcpWitness) -> "WitnessModel":
        return cls(V=MatrixModel.from_numpy(w.V), W=MatrixModel.from_numpy(w.W))

    def to_witness(self) -> TcpWitness:
        return TcpWitness(self.V.to_numpy(), self.W.to_numpy())


class KrausModel(BaseModel):
    d: int = Field(ge=1)
    left: List[MatrixModel]
    right: List[MatrixModel]

    @classmethod
    def from_kraus(cls, k: KrausSet) -> "KrausModel":
        return cls(
            d=k.d,
            left=[MatrixModel.from_numpy(P) for P in k.left],
            right=[MatrixModel.from_numpy(Q) for Q in k.right],
        )

    def to_kraus(self) -> KrausSet:
        return KrausSet(
            tuple(P.to_numpy() for P in self.left),
            tuple(Q.to_numpy() for Q in self.right),
            self.d,
        )


class CheckModel(BaseModel):
    name: str
    status: str
    margin: Optional[float] = None
    detail: str = ""


class CertificateModel(BaseModel):
    test: str
    passed: bool
    checks: List[CheckModel]

    @classmethod
    def from_report(cls, report: CertificateReport) -> "CertificateModel":
        return cls(
            test=report.test,
            passed=report.passed,
            checks=[CheckModel(name=c.name, status=c.status, margin=c.margin, detail=c.detail)
                    for c in report.checks],
        )


class VerdictModel(BaseModel):
    outcome: str
    certificate: Optional[str] = None
    witness: Optional[WitnessModel] = None
    margin: Optional[float] = None
    map_id: Optional[str] = None
    min_eigenvalue: Optional[float] = None
    inconclusive: List[str] = Field(default_factory=list)
    certificates: List[str] = Field(default_factory=list)


def dump_json(payload: Any) -> str:
    """Serialize a model or plain data with sorted keys and round-trip float repr."""
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(by_alias=True, exclude_none=True)
    return json.dumps(payload, sort_keys=True, indent=JSON_INDENT)


def load_json(text: str) -> Dict[str, Any]:
    """Raises ValueError on malformed JSON or a non-object document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"Malformed JSON: {e}")
    if not isinstance(data, dict):
        raise ValueError("Expected a JSON object")
    return data
