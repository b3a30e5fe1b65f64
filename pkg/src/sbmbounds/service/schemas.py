"""Request/response models for the HTTP surface.

"lambda" is a Python keyword, so models store it as `lam` with a field alias;
wire payloads always say "lambda". Threshold responses may legitimately carry
infinities (lambda = 0), hence ser_json_inf_nan="constants".
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class ParamsIn(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    k: int
    n: int
    c_in: float | None = None
    c_out: float | None = None
    d: float | None = None
    lam: float | None = Field(default=None, alias="lambda")

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "c_in": self.c_in,
            "c_out": self.c_out,
            "d": self.d,
            "lambda": self.lam,
        }


class ThresholdsIn(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    k: int
    lam: float = Field(alias="lambda")


class ThresholdsOut(BaseModel):
    model_config = ConfigDict(populate_by_name=True, ser_json_inf_nan="constants")

    k: int
    lam: float = Field(alias="lambda")
    d_lower: float
    d_ks: float
    d_upper: float
    below_ks_detectable: bool


class Table1In(BaseModel):
    ks: list[int] | None = None


class Table1Row(BaseModel):
    k: int
    lambda_star: float


class Table1Out(BaseModel):
    rows: list[Table1Row]


class GridIn(BaseModel):
    ks: list[int]
    lambdas: list[float]


class GridOut(BaseModel):
    rows: list[ThresholdsOut]


class GenerateIn(BaseModel):
    params: ParamsIn
    model: str = "planted"
    m: int | None = None
    seed: int = 0
    stream_id: int = 0


class GraphOut(BaseModel):
    n: int
    edges: list[list[int]]
    labels: list[int] | None = None


class DetectIn(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    graph: GraphOut
    k: int
    c_in: float | None = None
    c_out: float | None = None
    d: float | None = None
    lam: float | None = Field(default=None, alias="lambda")
    budget: float = 1e9


class DetectOut(BaseModel):
    found: bool
    labels: list[int] | None = None


class PhiIn(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    k: int
    d: float
    lam: float = Field(alias="lambda")
    restarts: int = 8
    seed: int = 0
    stream_id: int = 0


class PhiOut(BaseModel):
    best_alpha: list[list[float]]
    phi_value: float
    certificate: list[list[float]]
    negative_certified: bool


class SecondMomentIn(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    k: int
    d: float
    lam: float = Field(alias="lambda")
    n: int
    trials: int = 1000
    seed: int = 0
    stream_id: int = 0


class SecondMomentOut(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    k: int
    d: float
    lam: float = Field(alias="lambda")
    n: int
    trials: int
    estimate: float
    stderr: float


class DistinguishIn(BaseModel):
    params: ParamsIn
    trials: int = 100
    seed: int = 0
    stream_id: int = 0
    budget: float = 1e9
    workers: int = 1


class DistinguishOut(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    n: int
    k: int
    d: float
    lam: float = Field(alias="lambda")
    trials: int
    p_good_sbm: float
    p_good_er: float
    mean_overlap: float | None
    detected_sbm: int
    detected_er: int
