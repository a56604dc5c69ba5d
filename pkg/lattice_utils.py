"""
P² # nP̄² 的交叉格 ⟨1⟩ ⊕ n⟨−1⟩。

基底顺序：h, e₁, …, e_n（按爆破创建顺序）。配对为 diag(+1, −1, …, −1)。
整数类与有理类都不可变，可在线程间只读共享。
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from config import COEFF_LIMIT


class LatticeError(ValueError):
    pass


def _check_limit(value: int) -> int:
    if abs(value) > COEFF_LIMIT:
        raise LatticeError(f"❌ 系数 {value} 超出上限 {COEFF_LIMIT}")
    return value


@dataclass(frozen=True)
class DivisorClass:
    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise LatticeError("❌ 除子类至少要有 h 的系数")
        for c in coeffs:
            if isinstance(c, bool) or not isinstance(c, int):
                raise LatticeError(f"❌ 整数类的系数必须是整数：{c!r}")
            _check_limit(c)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def _same_rank(self, other: "DivisorClass"):
        if self.rank != other.rank:
            raise LatticeError(f"❌ 秩不一致：{self.rank} vs {other.rank}")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        if not isinstance(other, DivisorClass):
            return NotImplemented
        self._same_rank(other)
        return DivisorClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        if not isinstance(other, DivisorClass):
            return NotImplemented
        self._same_rank(other)
        return DivisorClass(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(tuple(-a for a in self.coeffs))

    def __mul__(self, k: int) -> "DivisorClass":
        if isinstance(k, bool) or not isinstance(k, int):
            return NotImplemented
        return DivisorClass(tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def extend(self, rank: int) -> "DivisorClass":
        """在新基向量上补 0，把类搬到更高秩的格里。"""
        if rank < self.rank:
            raise LatticeError(f"❌ 不能把秩 {self.rank} 的类缩到秩 {rank}")
        return DivisorClass(self.coeffs + (0,) * (rank - self.rank))

    def square(self) -> int:
        return pair(self, self)

    def __str__(self) -> str:
        return format_class(self.coeffs)


@dataclass(frozen=True)
class RationalClass:
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        if not coeffs:
            raise LatticeError("❌ 有理类至少要有 h 的系数")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_divisor(cls, d: DivisorClass) -> "RationalClass":
        return cls(tuple(Fraction(c) for c in d.coeffs))

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def __add__(self, other) -> "RationalClass":
        other = _as_rational(other)
        if self.rank != other.rank:
            raise LatticeError(f"❌ 秩不一致：{self.rank} vs {other.rank}")
        return RationalClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other) -> "RationalClass":
        return self + (-_as_rational(other))

    def __neg__(self) -> "RationalClass":
        return RationalClass(tuple(-a for a in self.coeffs))

    def __mul__(self, k) -> "RationalClass":
        if not isinstance(k, (int, Fraction)) or isinstance(k, bool):
            return NotImplemented
        return RationalClass(tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, DivisorClass):
            other = RationalClass.from_divisor(other)
        if not isinstance(other, RationalClass):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def square(self) -> Fraction:
        return pair(self, self)

    def __str__(self) -> str:
        return format_class(self.coeffs)


AnyClass = Union[DivisorClass, RationalClass]


def _as_rational(c: AnyClass) -> RationalClass:
    if isinstance(c, RationalClass):
        return c
    if isinstance(c, DivisorClass):
        return RationalClass.from_divisor(c)
    raise LatticeError(f"❌ 不是格中的类：{c!r}")


def pair(a: AnyClass, b: AnyClass) -> Union[int, Fraction]:
    """
    交叉配对 a₀b₀ − Σ aᵢbᵢ。

    参数：
        a, b: 同秩的整数类或有理类
    返回：
        两者都是整数类时返回 int，否则返回 Fraction
    """
    if a.rank != b.rank:
        raise LatticeError(f"❌ 秩不一致：{a.rank} vs {b.rank}")
    head = a.coeffs[0] * b.coeffs[0]
    tail = sum(x * y for x, y in zip(a.coeffs[1:], b.coeffs[1:]))
    value = head - tail
    if isinstance(a, DivisorClass) and isinstance(b, DivisorClass):
        return value
    return Fraction(value)


def canonical(n: int) -> DivisorClass:
    """P² # nP̄² 的典范类 K = −3h + Σeᵢ。"""
    if n < 0:
        raise LatticeError(f"❌ 爆破次数不能为负：{n}")
    return DivisorClass((-3,) + (1,) * n)


def hyperplane(rank: int) -> DivisorClass:
    return basis_class(rank, 0)


def basis_class(rank: int, index: int) -> DivisorClass:
    if not 0 <= index < rank:
        raise LatticeError(f"❌ 基向量下标 {index} 超出秩 {rank}")
    return DivisorClass(tuple(1 if i == index else 0 for i in range(rank)))


def zero_class(rank: int) -> DivisorClass:
    return DivisorClass((0,) * rank)


def arithmetic_genus(c: DivisorClass) -> int:
    """伴随公式 1 + (C² + K·C)/2。"""
    k = canonical(c.rank - 1)
    total = pair(c, c) + pair(k, c)
    # C² + K·C ≡ Σ cᵢ² + cᵢ ≡ 0 (mod 2)
    if total % 2:
        raise LatticeError(f"❌ C² + K·C 为奇数，格数据有误：{c}")
    return 1 + total // 2


def format_class(coeffs: Iterable) -> str:
    """按 h, e1, e2, … 写出类，仅用于诊断信息。"""
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        label = "h" if i == 0 else f"e{i}"
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        term = label if mag == 1 else f"{mag}{label}"
        parts.append((sign, term))
    if not parts:
        return "0"
    first_sign, first_term = parts[0]
    text = ("-" if first_sign == "-" else "") + first_term
    for sign, term in parts[1:]:
        text += f" {sign} {term}"
    return text
