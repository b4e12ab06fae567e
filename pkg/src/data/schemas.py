"""
JSON 文件模式

群体、模型、参数、图边表旁注与实验配置文件的 pydantic 校验模型; 节点编号从 1 开始
"""

from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, RootModel, field_validator, model_validator


class PopulationSchema(BaseModel):
    """群体文件"""
    model_config = ConfigDict(extra="forbid")

    n_nodes: int = Field(gt=0)
    subpops: List[List[int]] = Field(min_length=1)


class ModelSpecSchema(BaseModel):
    """模型文件; population 为内嵌群体或群体文件路径, 也可由 --population 提供"""
    model_config = ConfigDict(extra="forbid")

    variant: str
    alpha: Optional[float] = None
    population: Optional[Union[PopulationSchema, str]] = None


class ThetaSchema(RootModel[List[float]]):
    """参数文件: 扁平数组, 度参数在前, 经纪参数 (若有) 在最后"""

    root: List[float] = Field(min_length=1)


class GraphSidecar(BaseModel):
    """边表 CSV 的旁注文件"""
    model_config = ConfigDict(extra="ignore")

    n_nodes: int = Field(gt=1)
    variant: Optional[str] = None
    seed: Optional[int] = None


class ThetaStarSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lo: float = -1.25
    hi: float = -0.75
    brokerage: float = 0.25

    @model_validator(mode="after")
    def _check_range(self):
        if self.lo > self.hi:
            raise ValueError(f"lo 不能大于 hi: {self.lo} > {self.hi}")
        return self


class GibbsSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    burn_in_sweeps: Optional[int] = Field(default=None, ge=0)
    sweeps_between_samples: Optional[int] = Field(default=None, ge=1)
    scan_order: Optional[str] = None


class ExperimentFileSchema(BaseModel):
    """实验配置文件, 所有键可选, 未给出的沿用配置档"""
    model_config = ConfigDict(extra="forbid")

    profile: Optional[str] = None
    n_values: Optional[List[int]] = None
    replications: Optional[int] = Field(default=None, ge=1)
    variant: Optional[str] = None
    alpha: Optional[float] = None
    theta_star: Optional[ThetaStarSchema] = None
    gibbs: Optional[GibbsSchema] = None
    gamma: Optional[float] = Field(default=None, ge=0)
    max_iterations: Optional[int] = Field(default=None, ge=1)
    divergence_guard: Optional[float] = Field(default=None, gt=0)
    init: Optional[str] = None
    seed: Optional[int] = Field(default=None, ge=0)
    output_dir: Optional[str] = None
    n_workers: Optional[int] = Field(default=None, ge=1)
    record_wall_time: Optional[bool] = None
    norm_bound_u: Optional[float] = Field(default=None, gt=0)

    @field_validator("n_values")
    @classmethod
    def _check_n_values(cls, values):
        if values is not None and not values:
            raise ValueError("n_values 不能为空")
        return values
