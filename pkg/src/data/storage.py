"""
数据存储

群体/模型/参数 JSON, 边表 CSV (含旁注 JSON) 与实验结果文件的读写; 文件中节点编号从 1 开始
"""

import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Optional, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.core.exceptions import (
    BadNodeIdError,
    ConfigError,
    DuplicateEdgeError,
    SelfLoopError,
    WrongVariantError,
)
from src.core.graph.graph import Graph
from src.core.graph.population import Population, build_population
from src.core.models.spec import ModelSpec, Theta, Variant
from src.data.schemas import GraphSidecar, ModelSpecSchema, PopulationSchema, ThetaSchema

PathLike = Union[str, Path]

TRIAL_COLUMNS = [
    "n", "rep", "seed", "converged", "error_sup", "error_degrees",
    "error_brokerage", "iterations", "wall_ms",
]
POPULATION_COLUMNS = [
    "n", "rep", "k", "d_max", "min_subpop_size", "assumption_min3",
    "n_edges", "n_brokered", "norm_bound_ok",
]
TIMING_COLUMNS = ["n", "rep", "wall_ms"]


def _validated(schema, path: Path):
    try:
        return schema.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except FileNotFoundError:
        raise ConfigError(f"文件不存在: {path}")
    except (json.JSONDecodeError, ValidationError) as e:
        raise ConfigError(f"文件格式无效: {path} | {str(e)}")


def sidecar_path(edge_path: PathLike) -> Path:
    return Path(edge_path).with_suffix(".json")


class DataStorage:
    """实验数据的文件读写"""

    def __init__(self, data_dir: PathLike = "results"):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.data_dir = Path(data_dir)

    def _resolve(self, path: PathLike) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.data_dir / path

    def _prepare(self, path: PathLike) -> Path:
        path = self._resolve(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_json(self, payload: Any, path: PathLike) -> Path:
        path = self._prepare(path)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, ensure_ascii=False, indent=2, sort_keys=False)
        self.logger.info(f"已写入 {path}")
        return path

    def read_json(self, path: PathLike) -> Any:
        path = self._resolve(path)
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"文件不存在: {path}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"JSON 无效: {path} | {str(e)}")

    # 群体、模型与参数

    def save_population(self, pop: Population, path: PathLike) -> Path:
        return self.write_json(pop.to_dict(), path)

    def load_population(self, path: PathLike) -> Population:
        parsed = _validated(PopulationSchema, self._resolve(path))
        return build_population(parsed.subpops, parsed.n_nodes, one_based=True)

    def save_model(self, model: ModelSpec, path: PathLike, population_path: Optional[str] = None) -> Path:
        payload = model.to_dict()
        if population_path is not None:
            payload["population"] = population_path
        return self.write_json(payload, path)

    def load_model(self, path: PathLike, population: Optional[Population] = None) -> ModelSpec:
        """
        读取模型文件

        population 未给出时使用模型文件的 population 字段: 内嵌群体, 或相对模型文件的路径
        """
        path = self._resolve(path)
        parsed = _validated(ModelSpecSchema, path)
        if population is None:
            if parsed.population is None:
                raise ConfigError(f"模型文件未指定群体, 请提供 --population: {path}")
            if isinstance(parsed.population, str):
                population = self.load_population(path.parent / parsed.population)
            else:
                population = build_population(
                    parsed.population.subpops, parsed.population.n_nodes, one_based=True
                )
        try:
            variant = Variant(parsed.variant)
        except ValueError:
            raise ConfigError(f"未知的模型变体: {parsed.variant}")
        return ModelSpec(variant, population, parsed.alpha)

    def save_theta(self, theta: Theta, path: PathLike) -> Path:
        """θ 写为扁平数组, 经纪参数 (若有) 在最后"""
        return self.write_json(theta.to_list(), path)

    def load_theta(self, path: PathLike, model: ModelSpec) -> Theta:
        """
        读取扁平数组并按模型维数拆分

        Raises:
            WrongVariantError: 长度与模型参数个数不一致
        """
        path = self._resolve(path)
        parsed = _validated(ThetaSchema, path)
        try:
            return Theta.from_vector(parsed.root, model)
        except WrongVariantError:
            raise
        except ValueError as e:
            raise ConfigError(f"参数文件无效: {path} | {str(e)}")

    # 图

    def save_graph(self, g: Graph, path: PathLike, **meta) -> Path:
        """边表 CSV, 表头 i,j, 每行 i < j; 同名 .json 旁注记录 N"""
        path = self._prepare(path)
        edges = np.array(g.edge_list(), dtype=np.int64).reshape(-1, 2) + 1
        pd.DataFrame(edges, columns=["i", "j"]).to_csv(path, index=False)
        sidecar = GraphSidecar(n_nodes=g.n_nodes, **meta)
        self.write_json(sidecar.model_dump(exclude_none=True), sidecar_path(path))
        return path

    def load_graph(self, path: PathLike, n_nodes: Optional[int] = None) -> Graph:
        """
        读取边表 CSV

        Raises:
            SelfLoopError: 存在 i == j
            DuplicateEdgeError: 同一无序节点对出现多次
            BadNodeIdError: 编号越界或不是整数
        """
        path = self._resolve(path)
        if n_nodes is None:
            side = sidecar_path(path)
            if not side.exists():
                raise ConfigError(f"未提供节点数且缺少旁注文件: {side}")
            n_nodes = _validated(GraphSidecar, side).n_nodes
        try:
            frame = pd.read_csv(path)
        except FileNotFoundError:
            raise ConfigError(f"文件不存在: {path}")
        if list(frame.columns) != ["i", "j"]:
            raise ConfigError(f"边表表头必须为 i,j: {list(frame.columns)}")
        if not all(pd.api.types.is_integer_dtype(frame[c]) for c in ("i", "j")) and len(frame):
            raise BadNodeIdError(f"边表含非整数节点编号: {path}")

        pairs = frame.to_numpy(dtype=np.int64) - 1
        if len(pairs) == 0:
            return Graph.empty(n_nodes)
        if np.any(pairs < 0) or np.any(pairs >= n_nodes):
            raise BadNodeIdError(f"边表节点编号越界 | N: {n_nodes}")
        loops = pairs[pairs[:, 0] == pairs[:, 1]]
        if len(loops):
            raise SelfLoopError(f"边表含自环: 节点 {int(loops[0, 0]) + 1}")
        ordered = np.sort(pairs, axis=1)
        unique, counts = np.unique(ordered, axis=0, return_counts=True)
        if np.any(counts > 1):
            dup = unique[counts > 1][0] + 1
            raise DuplicateEdgeError(f"边表含重复边: ({dup[0]}, {dup[1]})")
        return Graph.from_edge_list(n_nodes, [tuple(p) for p in ordered.tolist()])

    # 实验结果

    def _write_rows(self, rows: Iterable[dict], columns: List[str], path: PathLike) -> Path:
        path = self._prepare(path)
        frame = pd.DataFrame(list(rows), columns=columns)
        frame.to_csv(path, index=False, lineterminator="\n")
        self.logger.info(f"已写入 {len(frame)} 行到 {path}")
        return path

    def write_trials(self, records: Iterable, path: PathLike = "trials.csv") -> Path:
        return self._write_rows((r.to_row() for r in records), TRIAL_COLUMNS, path)

    def write_populations(self, records: Iterable, path: PathLike = "populations.csv") -> Path:
        return self._write_rows((r.to_row() for r in records), POPULATION_COLUMNS, path)

    def write_timings(self, timings: Iterable, path: PathLike = "timings.csv") -> Path:
        rows = [dict(zip(TIMING_COLUMNS, t)) for t in timings]
        return self._write_rows(rows, TIMING_COLUMNS, path)

    def read_trials(self, path: PathLike = "trials.csv") -> List[dict]:
        path = self._resolve(path)
        try:
            frame = pd.read_csv(path)
        except FileNotFoundError:
            raise ConfigError(f"文件不存在: {path}")
        missing = [c for c in TRIAL_COLUMNS if c not in frame.columns]
        if missing:
            raise ConfigError(f"trials.csv 缺少列: {missing}")
        return frame[TRIAL_COLUMNS].to_dict(orient="records")
