"""
光滑拓扑记账：有理爆缩后的 b₂±、透镜空间阶、π₁ 平凡性证书与曲面数值检查。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Optional, Sequence

from chain_utils import Chain, hj_value


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class FourManifoldInvariants:
    b2_plus: int
    b2_minus: int

    def __post_init__(self):
        if self.b2_plus < 0 or self.b2_minus < 0:
            raise TopologyError(f"❌ b₂± 不能为负：({self.b2_plus}, {self.b2_minus})")

    @property
    def b2(self) -> int:
        return self.b2_plus + self.b2_minus

    @property
    def euler(self) -> int:
        # 单连通闭定向流形
        return 2 + self.b2

    @property
    def signature(self) -> int:
        return self.b2_plus - self.b2_minus

    @property
    def ksq_smooth(self) -> int:
        return 2 * self.euler + 3 * self.signature


def blowdown_invariants(before: FourManifoldInvariants, chain_lengths: Sequence[int]) -> FourManifoldInvariants:
    """
    把每条链换成有理球（b₂ = 0）之后的不变量。

    参数：
        before: 爆缩前的 (b₂⁺, b₂⁻)
        chain_lengths: 被换掉的链长（负定部分的秩）
    返回：
        b₂⁺ 不变、b₂⁻ 减去链长总和的新不变量
    """
    removed = sum(chain_lengths)
    if removed > before.b2_minus:
        raise TopologyError(f"❌ 链长总和 {removed} 超过 b₂⁻ = {before.b2_minus}")
    return FourManifoldInvariants(before.b2_plus, before.b2_minus - removed)


def lens_order(c: Chain) -> int:
    return hj_value(c)[0]


@dataclass(frozen=True)
class Pi1Edge:
    witness: str
    node_a: str
    node_b: str
    attach_a: str = "end"
    attach_b: str = "end"
    # 只作用于 mid 端
    power: Optional[int] = None

    def exponent(self, side: str) -> Optional[int]:
        attach = self.attach_a if side == "a" else self.attach_b
        if attach == "end":
            return 1
        return self.power


@dataclass
class Pi1Graph:
    nodes: dict[str, int]
    edges: list[Pi1Edge] = field(default_factory=list)

    def __post_init__(self):
        for name, order in self.nodes.items():
            if order < 1:
                raise TopologyError(f"❌ 节点 {name} 的阶必须 ≥ 1：{order}")
        for edge in self.edges:
            for node in (edge.node_a, edge.node_b):
                if node not in self.nodes:
                    raise TopologyError(f"❌ 边 {edge.witness} 引用了未知节点：{node}")
            for attach in (edge.attach_a, edge.attach_b):
                if attach not in ("end", "mid"):
                    raise TopologyError(f"❌ 边 {edge.witness} 的连接位置只能是 end/mid：{attach}")
            if edge.power is not None and edge.power < 1:
                raise TopologyError(f"❌ 边 {edge.witness} 的幂必须为正：{edge.power}")


@dataclass(frozen=True)
class Pi1Step:
    rule: str  # "gcd" 或 "propagate"
    witness: str
    detail: str
    orders: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Pi1Certificate:
    passed: bool
    trace: tuple[Pi1Step, ...]
    final_orders: tuple[tuple[str, int], ...]

    @property
    def surviving(self) -> list[str]:
        return [name for name, order in self.final_orders if order > 1]


def _propagation_step(graph: Pi1Graph, orders: dict[str, int]) -> Optional[Pi1Step]:
    for edge in graph.edges:
        for side, node, other in (("a", edge.node_a, edge.node_b), ("b", edge.node_b, edge.node_a)):
            k = edge.exponent(side)
            if orders[other] != 1 or orders[node] == 1 or k is None:
                continue
            new = gcd(orders[node], k)
            if new < orders[node]:
                old = orders[node]
                orders[node] = new
                return Pi1Step(
                    "propagate",
                    edge.witness,
                    f"{other} trivial ⇒ {node}: {old} → {new}",
                    ((node, new),),
                )
    return None


def _gcd_step(graph: Pi1Graph, orders: dict[str, int]) -> Optional[Pi1Step]:
    best = None
    for index, edge in enumerate(graph.edges):
        ka, kb = edge.exponent("a"), edge.exponent("b")
        if ka is None or kb is None:
            continue
        ma, mb = orders[edge.node_a], orders[edge.node_b]
        if ma == 1 or mb == 1:
            continue
        eff_a, eff_b = ma // gcd(ma, ka), mb // gcd(mb, kb)
        if gcd(eff_a, eff_b) != 1:
            continue
        new_a, new_b = gcd(ma, ka), gcd(mb, kb)
        if new_a == ma and new_b == mb:
            continue
        key = (ma * mb, index)
        if best is None or key < best[0]:
            best = (key, edge, eff_a, eff_b, new_a, new_b)
    if best is None:
        return None
    _, edge, eff_a, eff_b, new_a, new_b = best
    orders[edge.node_a] = new_a
    orders[edge.node_b] = new_b
    return Pi1Step(
        "gcd",
        edge.witness,
        f"gcd({eff_a},{eff_b})=1 ⇒ {edge.node_a}, {edge.node_b} trivial",
        ((edge.node_a, new_a), (edge.node_b, new_b)),
    )


def pi1_certificate(graph: Pi1Graph) -> Pi1Certificate:
    """
    反复应用传播规则（按边的声明顺序）与 gcd 规则（阶乘积最小者优先），直到不动点。
    所有节点的阶都降到 1 时证书通过；FAIL 是结果而不是错误。
    """
    orders = dict(graph.nodes)
    trace = []
    while True:
        step = _propagation_step(graph, orders) or _gcd_step(graph, orders)
        if step is None:
            break
        trace.append(step)
    final = tuple(orders.items())
    return Pi1Certificate(
        passed=all(order == 1 for order in orders.values()),
        trace=tuple(trace),
        final_orders=final,
    )


def noether_ok(p_g: int, ksq: int) -> bool:
    """Noether 不等式 p_g ≤ K²/2 + 2。"""
    return 2 * p_g <= ksq + 4


def chi_2K(chi_O: int, ksq: int) -> int:
    return chi_O + ksq


@dataclass(frozen=True)
class SmoothingRecord:
    ksq: Fraction
    pg: int
    chi: int
    after: FourManifoldInvariants
    q_assumed_zero: bool = True
    warnings: tuple[str, ...] = ()


def smoothing_invariants(
    ksq_x: Fraction,
    chain_lengths: Sequence[int],
    ambient: FourManifoldInvariants,
) -> SmoothingRecord:
    """
    一般纤维的记录：K² = K²_X，p_g = (b₂⁺ − 1)/2，χ(O) = 1 + p_g（假设 q = 0）。
    代数 K²_X 与拓扑 2e + 3σ 不一致时报错。
    """
    warnings = []
    ksq_x = Fraction(ksq_x)
    if ksq_x.denominator != 1:
        warnings.append(f"⚠️ K²_X = {ksq_x} 不是整数")
    after = blowdown_invariants(ambient, chain_lengths)
    if ksq_x != after.ksq_smooth:
        raise TopologyError(
            f"❌ 代数 K²_X = {ksq_x} 与拓扑 2e + 3σ = {after.ksq_smooth} 不一致"
        )
    if (after.b2_plus - 1) % 2:
        raise TopologyError(f"❌ b₂⁺ = {after.b2_plus} 为偶数，无法给出 p_g")
    pg = (after.b2_plus - 1) // 2
    return SmoothingRecord(
        ksq=ksq_x,
        pg=pg,
        chi=1 + pg,
        after=after,
        warnings=tuple(warnings),
    )


def graph_from_orders(orders: Mapping[str, int], edges: Sequence[Pi1Edge]) -> Pi1Graph:
    return Pi1Graph(dict(orders), list(edges))
