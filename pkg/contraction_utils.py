"""
收缩链：Artin 判别的负定性、差异系数、f*K_X、nef 表和 K²_X。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from chain_utils import (
    Chain,
    CpqMatch,
    TParams,
    is_class_T,
    recognize_cpq,
    t_params,
)
from lattice_utils import DivisorClass, RationalClass, pair
from surface_builder import SurfaceState, chain_check


class ContractionError(ValueError):
    pass


@dataclass(frozen=True)
class ChainContraction:
    name: str
    curves: tuple[str, ...]
    chain: Chain
    cpq: Optional[CpqMatch]
    tparams: tuple[TParams, ...]
    class_t: bool
    negative_definite: bool
    discrepancies: tuple[Fraction, ...]


@dataclass
class ContractionReport:
    chains: list[ChainContraction]
    pullback: RationalClass
    ksq_singular: Fraction
    nef_table: list[tuple[str, Fraction]] = field(default_factory=list)
    nef: bool = False

    def discrepancy_of(self, chain_name: str) -> tuple[Fraction, ...]:
        for entry in self.chains:
            if entry.name == chain_name:
                return entry.discrepancies
        raise ContractionError(f"❌ 没有被收缩的链：{chain_name}")


def chain_matrix(classes: Sequence[DivisorClass]) -> list[list[int]]:
    return [[pair(a, b) for b in classes] for a in classes]


def _bareiss(rows: list[list[int]], n: int) -> tuple[list[list[int]], int]:
    """
    无分数 Gauss 消元（Bareiss），就地化为上三角。

    参数：
        rows: n 行整数矩阵（可带增广列）
        n: 主元列数
    返回：
        (消元后的行, 行交换符号)；奇异时抛 ContractionError
    """
    sign = 1
    prev = 1
    width = len(rows[0])
    for k in range(n):
        if rows[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if rows[i][k] != 0), None)
            if swap is None:
                raise ContractionError("❌ 矩阵奇异")
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        pivot = rows[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, width):
                rows[i][j] = (rows[i][j] * pivot - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = pivot
    return rows, sign


def determinant(m: Sequence[Sequence[int]]) -> int:
    n = len(m)
    if n == 0:
        return 1
    try:
        rows, sign = _bareiss([list(r) for r in m], n)
    except ContractionError:
        return 0
    return sign * rows[n - 1][n - 1]


def leading_minors(m: Sequence[Sequence[int]]) -> list[int]:
    return [determinant([row[:k] for row in m[:k]]) for k in range(1, len(m) + 1)]


def is_negative_definite(m: Sequence[Sequence[int]]) -> bool:
    """Sylvester 判别：顺序主子式从负号开始交替。"""
    n = len(m)
    for i in range(n):
        if len(m[i]) != n:
            raise ContractionError("❌ 矩阵不是方阵")
        for j in range(i):
            if m[i][j] != m[j][i]:
                raise ContractionError(f"❌ 矩阵不对称：M[{i}][{j}] ≠ M[{j}][{i}]")
    return all((-1) ** k * minor > 0 for k, minor in enumerate(leading_minors(m), start=1))


def solve_exact(m: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[Fraction]:
    """Bareiss 消元后回代，得到 M x = rhs 的精确有理解。"""
    n = len(m)
    rows, _ = _bareiss([list(row) + [b] for row, b in zip(m, rhs)], n)
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = Fraction(rows[i][n])
        for j in range(i + 1, n):
            s -= rows[i][j] * x[j]
        x[i] = s / rows[i][i]
    return x


def discrepancies(classes: Sequence[DivisorClass], k: DivisorClass) -> list[Fraction]:
    """
    解 Σᵢ dᵢ (Gᵢ·Gⱼ) = −K·Gⱼ，使 (K + Σ dᵢGᵢ)·Gⱼ = 0。
    K·Gⱼ 取自真实的格类，不用伴随公式的捷径。
    """
    m = chain_matrix(classes)
    if not is_negative_definite(m):
        raise ContractionError("❌ 链的交叉矩阵不是负定的，不能收缩")
    rhs = [-pair(k, g) for g in classes]
    return solve_exact(m, rhs)


def pullback_canonical(s: SurfaceState, chains: Mapping[str, Sequence[str]]) -> RationalClass:
    k = s.canonical()
    total = RationalClass.from_divisor(k)
    for names in chains.values():
        classes = [s.curve(n) for n in names]
        for d, g in zip(discrepancies(classes, k), classes):
            total = total + d * RationalClass.from_divisor(g)
    # 定义性质：与每条被收缩曲线配对为 0
    for names in chains.values():
        for n in names:
            if pair(total, s.curve(n)) != 0:
                raise ContractionError(f"❌ f*K 与被收缩曲线 {n} 的配对不为 0")
    return total


def ksq_singular(pullback: RationalClass) -> Fraction:
    return pair(pullback, pullback)


def contract_chain(s: SurfaceState, chain_name: str) -> ChainContraction:
    chain = chain_check(s, chain_name)
    names = s.declared_chains[chain_name]
    classes = [s.curve(n) for n in names]
    negdef = is_negative_definite(chain_matrix(classes))
    class_t = is_class_T(chain)
    ds = tuple(discrepancies(classes, s.canonical())) if negdef else ()
    return ChainContraction(
        name=chain_name,
        curves=names,
        chain=chain,
        cpq=recognize_cpq(chain),
        tparams=tuple(t_params(chain)) if class_t else (),
        class_t=class_t,
        negative_definite=negdef,
        discrepancies=ds,
    )


def nef_report(s: SurfaceState, chains: Mapping[str, Sequence[str]], pullback: RationalClass) -> ContractionReport:
    """
    f*K_X 与每条未被收缩的登记曲线配对。
    nef 为真当且仅当所有值 ≥ 0 且所有差异系数在 (0, 1) 内。
    """
    entries = [contract_chain(s, name) for name in chains]
    contracted = {n for names in chains.values() for n in names}
    table = [
        (name, pair(pullback, cls))
        for name, cls in s.curves.items()
        if name not in contracted
    ]
    nef = all(value >= 0 for _, value in table) and all(
        0 < d < 1 for entry in entries for d in entry.discrepancies
    )
    return ContractionReport(
        chains=entries,
        pullback=pullback,
        ksq_singular=ksq_singular(pullback),
        nef_table=table,
        nef=nef,
    )
