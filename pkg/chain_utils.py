"""
Hirzebruch–Jung 连分数、C_{p,q} 链与 T 类链的识别和枚举。

链写作 [b_k, …, b_1]，对应自交数 −b_i 的线性球面管道。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, isqrt
from typing import Optional


class ChainError(ValueError):
    pass


@dataclass(frozen=True)
class Chain:
    bs: tuple[int, ...]

    def __post_init__(self):
        bs = tuple(self.bs)
        if not bs:
            raise ChainError("❌ 链不能为空")
        for b in bs:
            if isinstance(b, bool) or not isinstance(b, int) or b < 2:
                raise ChainError(f"❌ 链中每一项都必须是 ≥ 2 的整数：{list(bs)}")
        object.__setattr__(self, "bs", bs)

    def __len__(self) -> int:
        return len(self.bs)

    def __iter__(self):
        return iter(self.bs)

    def reversed(self) -> "Chain":
        return Chain(self.bs[::-1])

    def __str__(self) -> str:
        return "[" + ",".join(str(b) for b in self.bs) + "]"


@dataclass(frozen=True)
class CpqParams:
    p: int
    q: int

    def __post_init__(self):
        if not (self.p > self.q > 0) or gcd(self.p, self.q) != 1:
            raise ChainError(f"❌ 需要互素的 p > q > 0：({self.p}, {self.q})")

    def __str__(self) -> str:
        return f"C({self.p},{self.q})"


@dataclass(frozen=True)
class CpqMatch:
    params: CpqParams
    orientation: str  # "as-given" 或 "reversed"
    alternate: Optional[CpqParams] = None


@dataclass(frozen=True)
class TParams:
    d: int
    n: int
    a: int

    def __post_init__(self):
        if self.d < 1 or self.n < 1 or self.a < 1 or gcd(self.a, self.n) != 1:
            raise ChainError(f"❌ 无效的 (d,n,a)：({self.d}, {self.n}, {self.a})")

    def __str__(self) -> str:
        return f"({self.d},{self.n},{self.a})"


def hj_expand(m: int, l: int) -> Chain:
    """
    用“向上取整再取倒数”展开 m/l。

    参数：
        m, l: 互素整数，m > l ≥ 1
    返回：
        Chain [b_k, …, b_1]
    """
    if l < 1 or m <= l or gcd(m, l) != 1:
        raise ChainError(f"❌ 需要互素的 m > l ≥ 1：({m}, {l})")
    bs = []
    while l:
        b = -(-m // l)
        bs.append(b)
        m, l = l, b * l - m
    return Chain(tuple(bs))


def hj_value(c: Chain) -> tuple[int, int]:
    """从右往左求值，返回既约分数 (m, l)。"""
    m, l = c.bs[-1], 1
    for b in reversed(c.bs[:-1]):
        m, l = b * m - l, m
    return m, l


def cpq_chain(params: CpqParams) -> Chain:
    p, q = params.p, params.q
    return hj_expand(p * p, p * q - 1)


def _wahl_params(c: Chain) -> Optional[CpqParams]:
    m, l = hj_value(c)
    p = isqrt(m)
    if p < 2 or p * p != m or (l + 1) % p:
        return None
    q = (l + 1) // p
    if not 0 < q < p or gcd(p, q) != 1:
        return None
    return CpqParams(p, q)


def recognize_cpq(c: Chain) -> Optional[CpqMatch]:
    """
    识别 C_{p,q} 链。两个方向都匹配时（Wahl 链的反向总是 C_{p,p−q}），
    取 q 较小的方向；q 相同时取原方向，另一方向记在 alternate。
    """
    forward = _wahl_params(c)
    backward = _wahl_params(c.reversed())
    if forward is None and backward is None:
        return None
    if backward is None:
        return CpqMatch(forward, "as-given")
    if forward is None:
        return CpqMatch(backward, "reversed")
    if backward.q < forward.q:
        return CpqMatch(backward, "reversed", alternate=forward)
    if forward == backward:
        return CpqMatch(forward, "as-given")
    return CpqMatch(forward, "as-given", alternate=backward)


def _is_base_T(bs: tuple[int, ...]) -> bool:
    if bs == (4,):
        return True
    return len(bs) >= 2 and bs[0] == 3 and bs[-1] == 3 and all(b == 2 for b in bs[1:-1])


def _reduce_T(bs: tuple[int, ...]) -> bool:
    if _is_base_T(bs):
        return True
    if len(bs) < 2:
        return False
    # 去掉开头的 2，末项减一
    if bs[0] == 2 and bs[-1] > 2 and _reduce_T(bs[1:-1] + (bs[-1] - 1,)):
        return True
    # 去掉结尾的 2，首项减一
    if bs[-1] == 2 and bs[0] > 2 and _reduce_T((bs[0] - 1,) + bs[1:-1]):
        return True
    return False


def is_class_T(c: Chain) -> bool:
    """非有理二重点的 T 类链：由 [4]、[3,2^j,3] 出发迭代得到。"""
    return _reduce_T(c.bs)


def is_rdp_chain(c: Chain) -> bool:
    return all(b == 2 for b in c.bs)


def t_params(c: Chain) -> list[TParams]:
    """
    求所有满足 dn² = m、dna − 1 = l、gcd(a, n) = 1、n ≥ 2 的 (d, n, a)，按 d 升序。
    方向与 recognize_cpq 一致：两个方向都有解时取首个解 a 较小的方向。
    """
    if not is_class_T(c):
        raise ChainError(f"❌ {c} 不是 T 类链")
    forward = _t_solutions(*hj_value(c))
    backward = _t_solutions(*hj_value(c.reversed()))
    if backward and (not forward or backward[0].a < forward[0].a):
        return backward
    return forward


def _t_solutions(m: int, l: int) -> list[TParams]:
    found = []
    n = 2
    while n * n <= m:
        if m % (n * n) == 0:
            d = m // (n * n)
            if (l + 1) % (d * n) == 0:
                a = (l + 1) // (d * n)
                if gcd(a, n) == 1:
                    found.append(TParams(d, n, a))
        n += 1
    return sorted(found, key=lambda t: (t.d, t.n, t.a))


@dataclass
class _Closure:
    max_len: int
    max_b: int
    seen: dict[tuple[int, ...], bool] = field(default_factory=dict)

    def visit(self, bs: tuple[int, ...], from_j0: bool):
        if len(bs) > self.max_len or max(bs) > self.max_b:
            return
        if bs in self.seen:
            self.seen[bs] = self.seen[bs] or from_j0
            return
        self.seen[bs] = from_j0
        # 前面补 2，末项加一；后面补 2，首项加一
        self.visit((2,) + bs[:-1] + (bs[-1] + 1,), from_j0)
        self.visit((bs[0] + 1,) + bs[1:] + (2,), from_j0)


def enumerate_T_with_origin(max_len: int, max_b: int) -> list[tuple[Chain, bool]]:
    """返回 (链, 是否源自 j = 0 的 [3,3])，按字典序排列。"""
    if max_len < 1 or max_b < 3:
        raise ChainError(f"❌ 需要 max_len ≥ 1 且 max_b ≥ 3：({max_len}, {max_b})")
    closure = _Closure(max_len, max_b)
    closure.visit((4,), False)
    for j in range(0, max_len - 1):
        closure.visit((3,) + (2,) * j + (3,), j == 0)
    return [(Chain(bs), flag) for bs, flag in sorted(closure.seen.items())]


def enumerate_T(max_len: int, max_b: int) -> list[Chain]:
    return [chain for chain, _ in enumerate_T_with_origin(max_len, max_b)]
