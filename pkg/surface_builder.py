"""
爆破演算：在交叉格上执行构造脚本，维护命名曲线的当前类。

每个操作都返回新的 SurfaceState，旧状态保持不变。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from chain_utils import Chain
from lattice_utils import (
    DivisorClass,
    RationalClass,
    basis_class,
    canonical,
    hyperplane,
    pair,
    zero_class,
)


class BuilderError(ValueError):
    pass


class ChainCheckError(BuilderError):
    def __init__(self, message: str, chain: str, first: str, second: str, value: int):
        super().__init__(message)
        self.chain = chain
        self.pair = (first, second)
        self.value = value


@dataclass(frozen=True)
class BlowupRecord:
    exceptional_name: str
    incidences: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class CurveRecord:
    name: str
    coeffs: tuple[int, ...]


@dataclass(frozen=True)
class SurfaceState:
    lattice_rank: int = 1
    curves: dict[str, DivisorClass] = field(default_factory=dict)
    # 爆破名 → 新基向量下标
    basis_index: dict[str, int] = field(default_factory=dict)
    history: tuple[Union[CurveRecord, BlowupRecord], ...] = ()
    declared_chains: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def n_blowups(self) -> int:
        return self.lattice_rank - 1

    def canonical(self) -> DivisorClass:
        return canonical(self.n_blowups)

    def ksq(self) -> int:
        k = self.canonical()
        return pair(k, k)

    def curve(self, name: str) -> DivisorClass:
        if name not in self.curves:
            raise BuilderError(f"❌ 未知曲线：{name}")
        return self.curves[name]


def begin_plane() -> SurfaceState:
    """P²：秩 1 的格，空登记表。"""
    return SurfaceState()


def add_curve(s: SurfaceState, name: str, cls: DivisorClass) -> SurfaceState:
    if name in s.curves:
        raise BuilderError(f"❌ 曲线名重复：{name}")
    if cls.rank != s.lattice_rank:
        raise BuilderError(f"❌ 曲线 {name} 的秩 {cls.rank} 与当前格秩 {s.lattice_rank} 不一致")
    curves = dict(s.curves)
    curves[name] = cls
    return SurfaceState(
        lattice_rank=s.lattice_rank,
        curves=curves,
        basis_index=dict(s.basis_index),
        history=s.history + (CurveRecord(name, cls.coeffs),),
        declared_chains=dict(s.declared_chains),
    )


def blow_up(s: SurfaceState, exc_name: str, incidences: Mapping[str, int]) -> SurfaceState:
    """
    在一点爆破。

    参数：
        s: 当前状态
        exc_name: 新例外曲线的名字
        incidences: 过爆破中心的曲线名 → 重数
    返回：
        新状态：秩加一，过中心的曲线换成严格变换 C − m·e_new，其余补 0
    """
    if exc_name in s.curves:
        raise BuilderError(f"❌ 例外曲线名重复：{exc_name}")
    for name, mult in incidences.items():
        if name not in s.curves:
            raise BuilderError(f"❌ 爆破 {exc_name} 引用了未知曲线：{name}")
        if isinstance(mult, bool) or not isinstance(mult, int) or mult < 1:
            raise BuilderError(f"❌ 爆破 {exc_name} 在 {name} 上的重数必须为正整数：{mult}")

    rank = s.lattice_rank + 1
    curves = {}
    for name, cls in s.curves.items():
        extended = cls.extend(rank)
        mult = incidences.get(name, 0)
        if mult:
            coeffs = list(extended.coeffs)
            coeffs[-1] = -mult
            extended = DivisorClass(tuple(coeffs))
        curves[name] = extended
    curves[exc_name] = basis_class(rank, rank - 1)

    basis_index = dict(s.basis_index)
    basis_index[exc_name] = rank - 1
    record = BlowupRecord(exc_name, tuple(incidences.items()))
    return SurfaceState(
        lattice_rank=rank,
        curves=curves,
        basis_index=basis_index,
        history=s.history + (record,),
        declared_chains=dict(s.declared_chains),
    )


def resolve_symbol(s: SurfaceState, symbol: str) -> DivisorClass:
    """h → 超平面类，K → 典范类，@e → 爆破 e 的基向量，其余按曲线名取当前类。"""
    if symbol == "h":
        return hyperplane(s.lattice_rank)
    if symbol == "K":
        return s.canonical()
    if symbol.startswith("@"):
        name = symbol[1:]
        if name not in s.basis_index:
            raise BuilderError(f"❌ 未知的爆破基向量：{symbol}")
        return basis_class(s.lattice_rank, s.basis_index[name])
    return s.curve(symbol)


Term = tuple[Union[int, Fraction], str]


def combination_class(s: SurfaceState, terms: Iterable[Term]) -> Union[DivisorClass, RationalClass]:
    """按当前状态求线性组合；全是整数系数时返回整数类。"""
    terms = list(terms)
    if all(isinstance(c, int) or (isinstance(c, Fraction) and c.denominator == 1) for c, _ in terms):
        total = zero_class(s.lattice_rank)
        for coeff, symbol in terms:
            total = total + int(coeff) * resolve_symbol(s, symbol)
        return total
    total = RationalClass.from_divisor(zero_class(s.lattice_rank))
    for coeff, symbol in terms:
        total = total + Fraction(coeff) * RationalClass.from_divisor(resolve_symbol(s, symbol))
    return total


def assert_equal_class(s: SurfaceState, lhs: Iterable[Term], rhs: Iterable[Term]) -> bool:
    left = combination_class(s, lhs)
    right = combination_class(s, rhs)
    return left == right


def declare_chain(s: SurfaceState, chain_name: str, curve_names: Sequence[str]) -> SurfaceState:
    if chain_name in s.declared_chains:
        raise BuilderError(f"❌ 链名重复：{chain_name}")
    if not curve_names:
        raise BuilderError(f"❌ 链 {chain_name} 为空")
    used = {name: chain for chain, names in s.declared_chains.items() for name in names}
    seen = set()
    for name in curve_names:
        s.curve(name)
        if name in seen:
            raise BuilderError(f"❌ 链 {chain_name} 中曲线 {name} 出现两次")
        seen.add(name)
        if name in used:
            raise BuilderError(f"❌ 曲线 {name} 已属于链 {used[name]}，不能再放进 {chain_name}")
    chains = dict(s.declared_chains)
    chains[chain_name] = tuple(curve_names)
    return SurfaceState(
        lattice_rank=s.lattice_rank,
        curves=dict(s.curves),
        basis_index=dict(s.basis_index),
        history=s.history,
        declared_chains=chains,
    )


def chain_check(s: SurfaceState, chain_name: str) -> Chain:
    """
    用格配对验证链的相邻关系：相邻为 1，不相邻为 0，自交 ≤ −2。
    返回按声明顺序的 −自交数。
    """
    if chain_name not in s.declared_chains:
        raise BuilderError(f"❌ 未声明的链：{chain_name}")
    names = s.declared_chains[chain_name]
    classes = [s.curve(n) for n in names]
    bs = []
    for i, (name, cls) in enumerate(zip(names, classes)):
        self_int = pair(cls, cls)
        if self_int > -2:
            raise ChainCheckError(
                f"❌ 链 {chain_name}：{name} 的自交数 {self_int} 不满足 ≤ −2",
                chain_name, name, name, self_int,
            )
        bs.append(-self_int)
        for j in range(i + 1, len(names)):
            value = pair(cls, classes[j])
            wanted = 1 if j == i + 1 else 0
            if value != wanted:
                raise ChainCheckError(
                    f"❌ 链 {chain_name}：{name}·{names[j]} = {value}，应为 {wanted}",
                    chain_name, name, names[j], value,
                )
    return Chain(tuple(bs))


def check_disjoint(s: SurfaceState, chain_names: Sequence[str]):
    """不同链上的曲线两两配对为 0。"""
    for i, first in enumerate(chain_names):
        for second in chain_names[i + 1:]:
            for a in s.declared_chains[first]:
                for b in s.declared_chains[second]:
                    value = pair(s.curve(a), s.curve(b))
                    if value != 0:
                        raise ChainCheckError(
                            f"❌ 链 {first} 与 {second} 不相交性失败：{a}·{b} = {value}",
                            first, a, b, value,
                        )


def replay(history: Iterable[Union[CurveRecord, BlowupRecord]]) -> SurfaceState:
    """从 P² 起重放历史记录。"""
    s = begin_plane()
    for record in history:
        if isinstance(record, CurveRecord):
            s = add_curve(s, record.name, DivisorClass(record.coeffs))
        else:
            s = blow_up(s, record.exceptional_name, dict(record.incidences))
    return s
