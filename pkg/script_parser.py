"""
构造脚本（.rbd）的逐行解析与规范化输出。

每行一条语句，`#` 开始注释。诊断信息带行号和列号（都从 1 开始）。
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from config import EXPECT_KEYS, NAMED_EXPECT_KEYS, RESERVED_NAMES, SCRIPT_KEYWORDS, SURFACE_KINDS

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*'*")
NUMBER_RE = re.compile(r"\d+(?:/\d+)?")
INT_RE = re.compile(r"[+-]?\d+")

Coeff = Union[int, Fraction]
Term = tuple[Coeff, str]


class ScriptError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"❌ 第 {line} 行第 {column} 列：{message}")
        self.line = line
        self.column = column
        self.reason = message


# === 语句记录 ===
# line 不参与比较：规范化输出重新编号后仍应相等


@dataclass(frozen=True)
class SurfaceStmt:
    kind: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CurveStmt:
    name: str
    terms: tuple[Term, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BlowupStmt:
    name: str
    incidences: tuple[tuple[str, int], ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ChainStmt:
    name: str
    curves: tuple[str, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class AssertStmt:
    lhs: tuple[Term, ...]
    rhs: tuple[Term, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ConnectsStmt:
    witness: str
    node_a: str
    attach_a: str
    node_b: str
    attach_b: str
    power: Optional[int] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ContractStmt:
    chains: tuple[str, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ExpectStmt:
    key: str
    arg: Optional[str]
    value: object
    line: int = field(default=0, compare=False)


Statement = Union[SurfaceStmt, CurveStmt, BlowupStmt, ChainStmt, AssertStmt, ConnectsStmt, ContractStmt, ExpectStmt]


@dataclass(frozen=True)
class Script:
    statements: tuple[Statement, ...]
    source: str = field(default="<string>", compare=False)

    def of_type(self, kind: type) -> list:
        return [s for s in self.statements if isinstance(s, kind)]

    @property
    def contract(self) -> Optional[ContractStmt]:
        found = self.of_type(ContractStmt)
        return found[0] if found else None


class _Cursor:
    def __init__(self, text: str, line: int):
        self.text = text
        self.line = line
        self.pos = 0

    def error(self, message: str, pos: Optional[int] = None) -> ScriptError:
        return ScriptError(message, self.line, (self.pos if pos is None else pos) + 1)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek(self, literal: str) -> bool:
        self.skip()
        return self.text.startswith(literal, self.pos)

    def accept(self, literal: str) -> bool:
        if self.peek(literal):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str):
        if not self.accept(literal):
            raise self.error(f"期望 '{literal}'")

    def name(self, what: str = "名字") -> tuple[str, int]:
        self.skip()
        m = IDENT_RE.match(self.text, self.pos)
        if not m:
            raise self.error(f"期望{what}")
        self.pos = m.end()
        return m.group(), m.start()

    def integer(self) -> int:
        self.skip()
        m = INT_RE.match(self.text, self.pos)
        if not m:
            raise self.error("期望整数")
        self.pos = m.end()
        return int(m.group())

    def rational(self) -> Fraction:
        self.skip()
        start = self.pos
        negative = self.accept("-")
        self.skip()
        m = NUMBER_RE.match(self.text, self.pos)
        if not m:
            raise self.error("期望有理数", start)
        self.pos = m.end()
        value = _number(m.group(), self, m.start())
        return -Fraction(value) if negative else Fraction(value)

    def finish(self):
        if not self.at_end():
            raise self.error("行尾有多余内容")


def _number(text: str, cur: _Cursor, pos: int) -> Coeff:
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise cur.error("分母为 0", pos)
        value = Fraction(int(num), int(den))
        return int(value) if value.denominator == 1 else value
    return int(text)


@dataclass
class _Scope:
    curves: set = field(default_factory=set)
    blowups: set = field(default_factory=set)
    chains: dict = field(default_factory=dict)
    chain_owner: dict = field(default_factory=dict)
    has_contract: bool = False

    def check_symbol(self, symbol: str, cur: _Cursor, pos: int):
        if symbol in RESERVED_NAMES:
            return
        if symbol.startswith("@"):
            if symbol[1:] not in self.blowups:
                raise cur.error(f"未声明的爆破：{symbol[1:]}", pos)
            return
        if symbol not in self.curves:
            raise cur.error(f"未声明的曲线：{symbol}", pos)

    def new_curve(self, name: str, cur: _Cursor, pos: int):
        if name in RESERVED_NAMES:
            raise cur.error(f"'{name}' 是保留名", pos)
        if name in self.curves:
            raise cur.error(f"曲线名重复：{name}", pos)
        self.curves.add(name)

    def curve_ref(self, cur: _Cursor) -> str:
        name, pos = cur.name("曲线名")
        if name not in self.curves:
            raise cur.error(f"未声明的曲线：{name}", pos)
        return name

    def chain_ref(self, cur: _Cursor) -> str:
        name, pos = cur.name("链名")
        if name not in self.chains:
            raise cur.error(f"未声明的链：{name}", pos)
        return name


def _parse_terms(cur: _Cursor, scope: _Scope, allow_fraction: bool) -> tuple[Term, ...]:
    terms = []
    sign = -1 if cur.accept("-") else 1
    if sign == 1:
        cur.accept("+")
    while True:
        cur.skip()
        start = cur.pos
        coeff: Coeff = 1
        m = NUMBER_RE.match(cur.text, cur.pos)
        if m:
            if "/" in m.group() and not allow_fraction:
                raise cur.error("这里只允许整数系数", start)
            coeff = _number(m.group(), cur, start)
            cur.pos = m.end()
            cur.accept("*")
            cur.skip()
            if not (cur.peek("@") or IDENT_RE.match(cur.text, cur.pos)):
                if coeff == 0 and not terms and sign == 1:
                    # 单独的 0 是零类；后面还有项时跳过这个 0
                    if cur.at_end() or cur.peek("=="):
                        return ()
                    if cur.accept("+"):
                        continue
                    if cur.peek("-") and not cur.peek("--"):
                        cur.accept("-")
                        sign = -1
                        continue
                raise cur.error("期望曲线名或基类")
        cur.skip()
        at = cur.accept("@")
        name, pos = cur.name("曲线名或基类")
        symbol = "@" + name if at else name
        scope.check_symbol(symbol, cur, pos - (1 if at else 0))
        terms.append((sign * coeff, symbol))
        if cur.accept("+"):
            sign = 1
        elif cur.peek("-") and not cur.peek("--"):
            cur.accept("-")
            sign = -1
        else:
            return tuple(terms)


def _parse_expect_value(cur: _Cursor, scope: _Scope, kind: str):
    if kind == "int":
        return cur.integer()
    if kind == "rational":
        return cur.rational()
    if kind == "bool":
        word, pos = cur.name("true/false")
        if word not in ("true", "false"):
            raise cur.error("期望 true 或 false", pos)
        return word == "true"
    if kind == "verdict":
        word, pos = cur.name("pass/fail")
        if word not in ("pass", "fail"):
            raise cur.error("期望 pass 或 fail", pos)
        return word
    if kind == "rationals":
        cur.expect("[")
        values = [cur.rational()]
        while cur.accept(","):
            values.append(cur.rational())
        cur.expect("]")
        return tuple(values)
    if kind == "pair":
        cur.expect("(")
        first = cur.integer()
        cur.expect(",")
        second = cur.integer()
        cur.expect(")")
        return (first, second)
    if kind == "rclass":
        return _parse_terms(cur, scope, allow_fraction=True)
    raise cur.error(f"未知的值类型：{kind}")


def _parse_statement(keyword: str, cur: _Cursor, scope: _Scope) -> Statement:
    line = cur.line
    # === surface ===
    if keyword == "surface":
        kind, pos = cur.name("曲面类型")
        if kind not in SURFACE_KINDS:
            raise cur.error(f"不支持的曲面：{kind}", pos)
        return SurfaceStmt(kind, line=line)

    # === curve ===
    if keyword == "curve":
        name, pos = cur.name("曲线名")
        cur.expect("=")
        terms = _parse_terms(cur, scope, allow_fraction=False)
        scope.new_curve(name, cur, pos)
        return CurveStmt(name, terms, line=line)

    # === blowup ===
    if keyword == "blowup":
        name, pos = cur.name("例外曲线名")
        word, wpos = cur.name("'at'")
        if word != "at":
            raise cur.error("期望 'at'", wpos)
        cur.expect("{")
        incidences = []
        seen = set()
        if not cur.accept("}"):
            while True:
                ref = scope.curve_ref(cur)
                if ref in seen:
                    raise cur.error(f"曲线 {ref} 重复出现")
                seen.add(ref)
                mult = 1
                if cur.accept("*"):
                    mpos = cur.pos
                    mult = cur.integer()
                    if mult < 1:
                        raise cur.error("重数必须为正", mpos)
                incidences.append((ref, mult))
                if cur.accept("}"):
                    break
                cur.expect(",")
        scope.new_curve(name, cur, pos)
        scope.blowups.add(name)
        return BlowupStmt(name, tuple(incidences), line=line)

    # === chain ===
    if keyword == "chain":
        name, pos = cur.name("链名")
        if name in scope.chains:
            raise cur.error(f"链名重复：{name}", pos)
        cur.expect("=")
        cur.expect("[")
        curves = []
        while True:
            cpos = cur.pos
            ref = scope.curve_ref(cur)
            if ref in scope.chain_owner or ref in curves:
                owner = scope.chain_owner.get(ref, name)
                raise cur.error(f"曲线 {ref} 已在链 {owner} 中", cpos)
            curves.append(ref)
            if cur.accept("]"):
                break
            cur.expect(",")
        scope.chains[name] = tuple(curves)
        for ref in curves:
            scope.chain_owner[ref] = name
        return ChainStmt(name, tuple(curves), line=line)

    # === assert ===
    if keyword == "assert":
        lhs = _parse_terms(cur, scope, allow_fraction=False)
        cur.expect("==")
        rhs = _parse_terms(cur, scope, allow_fraction=False)
        return AssertStmt(lhs, rhs, line=line)

    # === connects ===
    if keyword == "connects":
        witness = scope.curve_ref(cur)
        cur.expect(":")
        ends = []
        for i in range(2):
            if i:
                cur.expect("--")
            node = scope.chain_ref(cur)
            cur.expect("(")
            attach, apos = cur.name("end/mid")
            if attach not in ("end", "mid"):
                raise cur.error("连接位置只能是 end 或 mid", apos)
            cur.expect(")")
            ends.append((node, attach))
        power = None
        if not cur.at_end():
            word, wpos = cur.name("'power'")
            if word != "power":
                raise cur.error("期望 'power'", wpos)
            ppos = cur.pos
            power = cur.integer()
            if power < 1:
                raise cur.error("幂必须为正", ppos)
        return ConnectsStmt(witness, ends[0][0], ends[0][1], ends[1][0], ends[1][1], power, line=line)

    # === contract ===
    if keyword == "contract":
        if scope.has_contract:
            raise cur.error("只能有一条 contract 语句", 0)
        chains = [scope.chain_ref(cur)]
        while cur.accept(","):
            chains.append(scope.chain_ref(cur))
        if len(set(chains)) != len(chains):
            raise cur.error("contract 中链名重复")
        scope.has_contract = True
        return ContractStmt(tuple(chains), line=line)

    # === expect ===
    key, kpos = cur.name("expect 键")
    if key not in EXPECT_KEYS:
        raise cur.error(f"未知的 expect 键：{key}", kpos)
    arg = None
    if key in NAMED_EXPECT_KEYS:
        arg = scope.chain_ref(cur) if NAMED_EXPECT_KEYS[key] == "chain" else scope.curve_ref(cur)
    cur.expect("=")
    value = _parse_expect_value(cur, scope, EXPECT_KEYS[key])
    return ExpectStmt(key, arg, value, line=line)


def decode_script(data: bytes) -> str:
    """按 UTF-8 解码脚本；坏字节报成所在的行和列。"""
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line_start = data.rfind(b"\n", 0, exc.start) + 1
        line = data.count(b"\n", 0, exc.start) + 1
        column = len(data[line_start:exc.start].decode("utf-8", errors="replace")) + 1
        raise ScriptError(f"不是合法的 UTF-8（字节 0x{data[exc.start]:02x}）", line, column) from exc


def parse_script(text: str, source: str = "<string>") -> Script:
    """
    解析整份脚本。

    参数：
        text: 脚本文本
        source: 来源（文件名），只用于报告
    返回：
        Script；任何语法、引用或重复错误都抛 ScriptError
    """
    scope = _Scope()
    statements = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        cur = _Cursor(body, lineno)
        if cur.at_end():
            continue
        keyword, pos = cur.name("关键字")
        if keyword not in SCRIPT_KEYWORDS:
            raise cur.error(f"未知关键字：{keyword}", pos)
        if not statements and keyword != "surface":
            raise cur.error("missing surface statement：第一条语句必须是 surface", pos)
        if statements and keyword == "surface":
            raise cur.error("surface 语句只能出现一次", pos)
        statements.append(_parse_statement(keyword, cur, scope))
        cur.finish()
    if not statements:
        raise ScriptError("missing surface statement", 1, 1)
    return Script(tuple(statements), source=source)


# === 规范化输出 ===


def format_terms(terms: tuple[Term, ...]) -> str:
    if not terms:
        return "0"
    parts = []
    for i, (coeff, symbol) in enumerate(terms):
        negative = coeff < 0
        mag = -coeff if negative else coeff
        body = symbol if mag == 1 else f"{mag} {symbol}"
        if i == 0:
            parts.append(("-" if negative else "") + body)
        else:
            parts.append(("- " if negative else "+ ") + body)
    return " ".join(parts)


def format_expect_value(kind: str, value) -> str:
    if kind == "bool":
        return "true" if value else "false"
    if kind == "rationals":
        return "[" + ", ".join(str(v) for v in value) + "]"
    if kind == "pair":
        return f"({value[0]}, {value[1]})"
    if kind == "rclass":
        return format_terms(value)
    return str(value)


def format_statement(stmt: Statement) -> str:
    if isinstance(stmt, SurfaceStmt):
        return f"surface {stmt.kind}"
    if isinstance(stmt, CurveStmt):
        return f"curve {stmt.name} = {format_terms(stmt.terms)}"
    if isinstance(stmt, BlowupStmt):
        inner = ", ".join(n if m == 1 else f"{n}*{m}" for n, m in stmt.incidences)
        return f"blowup {stmt.name} at {{{inner}}}"
    if isinstance(stmt, ChainStmt):
        return f"chain {stmt.name} = [{', '.join(stmt.curves)}]"
    if isinstance(stmt, AssertStmt):
        return f"assert {format_terms(stmt.lhs)} == {format_terms(stmt.rhs)}"
    if isinstance(stmt, ConnectsStmt):
        text = f"connects {stmt.witness} : {stmt.node_a}({stmt.attach_a}) -- {stmt.node_b}({stmt.attach_b})"
        return text if stmt.power is None else f"{text} power {stmt.power}"
    if isinstance(stmt, ContractStmt):
        return "contract " + ", ".join(stmt.chains)
    key = stmt.key if stmt.arg is None else f"{stmt.key} {stmt.arg}"
    return f"expect {key} = {format_expect_value(EXPECT_KEYS[stmt.key], stmt.value)}"


def serialize_script(script: Script) -> str:
    return "\n".join(format_statement(s) for s in script.statements) + "\n"
