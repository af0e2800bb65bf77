"""Network specification files: parsing, validation, and round-tripping.

A network spec is a JSON document::

    {
      "nodes": [{"id": 1, "model": "bistable"},
                {"id": 2, "model": "linear_stable", "params": {"k": 2.0}, "rho": 1.5}],
      "edges": [{"from": 1, "to": 2, "weight": 1.0}],
      "analysis": {"gamma_o": 1.0, "gamma_list": [1.0, 10.0], "r_o": 5.0,
                   "epsilon": 1.0, "horizon": null, "dt": 0.01,
                   "seed": 1, "num_initial_conditions": 10}
    }

Node ids are 1-based and must be contiguous ``1..n``.  ``rho`` optionally
overrides the model's default dissipation radius.  ``horizon`` may be null,
in which case the validator picks ``2 * T_f + 10`` from the certificate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .digraph import DiGraph
from .nodes import SemiPassiveNode, builtin_node


class SpecFormatError(ValueError):
    """The spec file does not parse or fails schema validation."""


@dataclass(frozen=True)
class NodeSpec:
    id: int
    model: str
    params: dict = field(default_factory=dict)
    rho: Optional[float] = None


@dataclass(frozen=True)
class EdgeSpec:
    src: int
    dst: int
    weight: float


@dataclass(frozen=True)
class AnalysisSpec:
    gamma_o: float
    gamma_list: tuple[float, ...]
    r_o: float
    epsilon: float = 1.0
    horizon: Optional[float] = None
    dt: float = 0.01
    seed: int = 0
    num_initial_conditions: int = 10


@dataclass(frozen=True)
class NetworkSpec:
    nodes: tuple[NodeSpec, ...]
    edges: tuple[EdgeSpec, ...]
    analysis: AnalysisSpec

    @property
    def n(self) -> int:
        return len(self.nodes)

    def to_json_dict(self) -> dict:
        return {
            "nodes": [
                {"id": ns.id, "model": ns.model}
                | ({"params": dict(ns.params)} if ns.params else {})
                | ({"rho": ns.rho} if ns.rho is not None else {})
                for ns in self.nodes
            ],
            "edges": [{"from": e.src, "to": e.dst, "weight": e.weight} for e in self.edges],
            "analysis": {
                "gamma_o": self.analysis.gamma_o,
                "gamma_list": list(self.analysis.gamma_list),
                "r_o": self.analysis.r_o,
                "epsilon": self.analysis.epsilon,
                "horizon": self.analysis.horizon,
                "dt": self.analysis.dt,
                "seed": self.analysis.seed,
                "num_initial_conditions": self.analysis.num_initial_conditions,
            },
        }


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise SpecFormatError(msg)


def _positive(value, where: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             f"{where} must be a number")
    _require(float(value) > 0.0, f"{where} must be positive")
    return float(value)


def parse_network_spec(data: dict) -> NetworkSpec:
    """Validate a parsed JSON document and build a ``NetworkSpec``."""
    _require(isinstance(data, dict), "top level must be an object")
    for key in ("nodes", "edges", "analysis"):
        _require(key in data, f"missing top-level key {key!r}")

    raw_nodes = data["nodes"]
    _require(isinstance(raw_nodes, list) and raw_nodes, "nodes must be a nonempty array")
    nodes = []
    for i, item in enumerate(raw_nodes):
        where = f"nodes[{i}]"
        _require(isinstance(item, dict), f"{where} must be an object")
        _require(isinstance(item.get("id"), int), f"{where}.id must be an integer")
        _require(isinstance(item.get("model"), str), f"{where}.model must be a string")
        params = item.get("params", {})
        _require(isinstance(params, dict), f"{where}.params must be an object")
        rho = item.get("rho")
        if rho is not None:
            rho = _positive(rho, f"{where}.rho")
        nodes.append(NodeSpec(id=item["id"], model=item["model"], params=dict(params), rho=rho))
    ids = sorted(ns.id for ns in nodes)
    _require(ids == list(range(1, len(nodes) + 1)),
             f"node ids must be contiguous 1..{len(nodes)}, got {ids}")
    nodes.sort(key=lambda ns: ns.id)

    raw_edges = data["edges"]
    _require(isinstance(raw_edges, list), "edges must be an array")
    edges = []
    for i, item in enumerate(raw_edges):
        where = f"edges[{i}]"
        _require(isinstance(item, dict), f"{where} must be an object")
        for key in ("from", "to", "weight"):
            _require(key in item, f"{where} is missing {key!r}")
        _require(isinstance(item["from"], int) and isinstance(item["to"], int),
                 f"{where}.from/.to must be integers")
        weight = _positive(item["weight"], f"{where}.weight")
        edges.append(EdgeSpec(src=item["from"], dst=item["to"], weight=weight))

    raw = data["analysis"]
    _require(isinstance(raw, dict), "analysis must be an object")
    for key in ("gamma_o", "r_o"):
        _require(key in raw, f"analysis is missing {key!r}")
    gamma_o = _positive(raw["gamma_o"], "analysis.gamma_o")
    r_o = _positive(raw["r_o"], "analysis.r_o")
    epsilon = _positive(raw.get("epsilon", 1.0), "analysis.epsilon")
    dt = _positive(raw.get("dt", 0.01), "analysis.dt")
    horizon = raw.get("horizon")
    if horizon is not None:
        horizon = _positive(horizon, "analysis.horizon")
    gamma_list = raw.get("gamma_list", [gamma_o])
    _require(isinstance(gamma_list, list) and gamma_list, "analysis.gamma_list must be a nonempty array")
    gamma_list = tuple(_positive(g, "analysis.gamma_list entry") for g in gamma_list)
    seed = raw.get("seed", 0)
    _require(isinstance(seed, int), "analysis.seed must be an integer")
    num_ic = raw.get("num_initial_conditions", 10)
    _require(isinstance(num_ic, int) and num_ic >= 1,
             "analysis.num_initial_conditions must be a positive integer")

    return NetworkSpec(
        nodes=tuple(nodes),
        edges=tuple(edges),
        analysis=AnalysisSpec(
            gamma_o=gamma_o, gamma_list=gamma_list, r_o=r_o, epsilon=epsilon,
            horizon=horizon, dt=dt, seed=seed, num_initial_conditions=num_ic,
        ),
    )


def load_network_spec(path) -> NetworkSpec:
    """Parse a spec file; JSON errors keep their line/column positions."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return parse_network_spec(data)
    except SpecFormatError as exc:
        raise SpecFormatError(f"{path}: {exc}") from None


def save_network_spec(spec: NetworkSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec.to_json_dict(), fh, indent=2)
        fh.write("\n")


def build_graph(spec: NetworkSpec) -> DiGraph:
    return DiGraph.from_edges(spec.n, [(e.src, e.dst, e.weight) for e in spec.edges])


def build_nodes(spec: NetworkSpec) -> list[SemiPassiveNode]:
    built = []
    for ns in spec.nodes:
        params = dict(ns.params)
        if ns.rho is not None:
            params["rho"] = ns.rho
        try:
            built.append(builtin_node(ns.model, **params))
        except (ValueError, TypeError) as exc:
            raise SpecFormatError(f"node {ns.id}: {exc}") from exc
    return built


def sample_initial_conditions(spec: NetworkSpec) -> list[np.ndarray]:
    """Seeded sample of ``num_initial_conditions`` points, uniform in the ball
    ``|x0| <= r_o``."""
    rng = np.random.default_rng(spec.analysis.seed)
    n = spec.n
    out = []
    for _ in range(spec.analysis.num_initial_conditions):
        direction = rng.standard_normal(n)
        norm = float(np.linalg.norm(direction))
        while norm < 1e-12:
            direction = rng.standard_normal(n)
            norm = float(np.linalg.norm(direction))
        radius = spec.analysis.r_o * rng.uniform() ** (1.0 / n)
        out.append(radius * direction / norm)
    return out
