"""
报告：结果记录、pandas 表格、文本与 JSON 输出。

JSON 的键顺序固定，分数统一写成 "num/den"，同样的输入得到逐字节相同的输出。
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import pandas as pd

from chain_utils import Chain, CpqMatch, TParams
from config import (
    CHAIN_TABLE_COLUMNS,
    DISCREPANCY_TABLE_COLUMNS,
    EXPECT_TABLE_COLUMNS,
    NEF_TABLE_COLUMNS,
    PI1_TRACE_COLUMNS,
    REPORT_SCHEMA_VERSION,
)
from contraction_utils import ContractionReport
from topology_utils import FourManifoldInvariants, Pi1Certificate, SmoothingRecord


@dataclass(frozen=True)
class AssertionResult:
    line: int
    text: str
    passed: bool


@dataclass(frozen=True)
class ExpectationResult:
    line: int
    key: str
    expected: str
    actual: str
    passed: bool


@dataclass(frozen=True)
class ChainRow:
    name: str
    curves: tuple[str, ...]
    chain: Chain
    cpq: Optional[CpqMatch]
    tparams: tuple[TParams, ...]
    lens_order: int
    negative_definite: bool
    class_t: bool


@dataclass
class Report:
    source: str
    rank: int
    ksq_ambient: int
    basis_labels: tuple[str, ...]
    ambient: FourManifoldInvariants
    assertions: list[AssertionResult] = field(default_factory=list)
    chains: list[ChainRow] = field(default_factory=list)
    contracted: tuple[str, ...] = ()
    contraction: Optional[ContractionReport] = None
    after: Optional[FourManifoldInvariants] = None
    smoothing: Optional[SmoothingRecord] = None
    pi1: Optional[Pi1Certificate] = None
    numerology: list[str] = field(default_factory=list)
    assumptions: list[str] = field(default_factory=list)
    expectations: list[ExpectationResult] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        checks = [a.passed for a in self.assertions] + [e.passed for e in self.expectations]
        if self.pi1 is not None:
            checks.append(self.pi1.passed)
        return all(checks)

    def chain_row(self, name: str) -> Optional[ChainRow]:
        return next((row for row in self.chains if row.name == name), None)


def fmt(value) -> str:
    """Fraction → "num/den"，整数不带分母。"""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(fmt(v) for v in value) + "]"
    return str(value)


def _cpq_text(match: Optional[CpqMatch]) -> str:
    if match is None:
        return "-"
    return f"C({match.params.p},{match.params.q})"


# === 表格 ===


def chain_table(report: Report) -> pd.DataFrame:
    rows = [
        {
            "name": row.name,
            "chain": str(row.chain),
            "cpq": _cpq_text(row.cpq),
            "orientation": row.cpq.orientation if row.cpq else "-",
            "tparams": " ".join(str(t) for t in row.tparams) or "-",
            "lens_order": row.lens_order,
            "negative_definite": row.negative_definite,
            "class_t": row.class_t,
        }
        for row in report.chains
    ]
    df = pd.DataFrame(rows, columns=list(CHAIN_TABLE_COLUMNS))
    return df.rename(columns=CHAIN_TABLE_COLUMNS)


def discrepancy_table(report: Report) -> pd.DataFrame:
    rows = []
    if report.contraction is not None:
        for entry in report.contraction.chains:
            for curve, b, d in zip(entry.curves, entry.chain.bs, entry.discrepancies):
                rows.append({"chain": entry.name, "curve": curve, "self_intersection": -b, "discrepancy": fmt(d)})
    df = pd.DataFrame(rows, columns=list(DISCREPANCY_TABLE_COLUMNS))
    return df.rename(columns=DISCREPANCY_TABLE_COLUMNS)


def nef_table(report: Report) -> pd.DataFrame:
    rows = []
    if report.contraction is not None:
        rows = [{"curve": name, "value": fmt(value)} for name, value in report.contraction.nef_table]
    df = pd.DataFrame(rows, columns=list(NEF_TABLE_COLUMNS))
    return df.rename(columns=NEF_TABLE_COLUMNS)


def expectation_table(report: Report) -> pd.DataFrame:
    rows = [
        {"line": e.line, "key": e.key, "expected": e.expected, "actual": e.actual, "passed": e.passed}
        for e in report.expectations
    ]
    df = pd.DataFrame(rows, columns=list(EXPECT_TABLE_COLUMNS))
    return df.rename(columns=EXPECT_TABLE_COLUMNS)


def pi1_trace_table(report: Report) -> pd.DataFrame:
    rows = []
    if report.pi1 is not None:
        rows = [
            {"step": i, "rule": step.rule, "edge": step.witness, "detail": step.detail}
            for i, step in enumerate(report.pi1.trace, start=1)
        ]
    df = pd.DataFrame(rows, columns=list(PI1_TRACE_COLUMNS))
    return df.rename(columns=PI1_TRACE_COLUMNS)


def summary_table(report: Report) -> pd.DataFrame:
    items = [
        ("script", report.source),
        ("rank", report.rank),
        ("K² (ambient)", report.ksq_ambient),
        ("(b2+, b2-) ambient", f"({report.ambient.b2_plus}, {report.ambient.b2_minus})"),
    ]
    if report.contraction is not None:
        items.append(("K²_X", fmt(report.contraction.ksq_singular)))
        items.append(("nef", fmt(report.contraction.nef)))
    if report.after is not None:
        items.append(("(b2+, b2-) after", f"({report.after.b2_plus}, {report.after.b2_minus})"))
        items.append(("2e + 3σ", report.after.ksq_smooth))
    if report.smoothing is not None:
        items.append(("p_g", report.smoothing.pg))
        items.append(("χ(O)", report.smoothing.chi))
    if report.pi1 is not None:
        items.append(("π1", "PASS" if report.pi1.passed else "FAIL"))
    items.append(("passed", fmt(report.passed)))
    return pd.DataFrame(items, columns=["item", "value"])


def pullback_terms(report: Report) -> list[tuple[str, Fraction]]:
    if report.contraction is None:
        return []
    return [
        (label, coeff)
        for label, coeff in zip(report.basis_labels, report.contraction.pullback.coeffs)
        if coeff != 0
    ]


# === 文本 ===


def _section(title: str, df: pd.DataFrame) -> list[str]:
    if df.empty:
        return []
    return [f"=== {title} ===", df.to_string(index=False), ""]


def render_text(report: Report) -> str:
    lines = [f"📄 {report.source}", ""]
    lines += _section("概要", summary_table(report))
    if report.assertions:
        lines.append("=== 类恒等式 ===")
        for a in report.assertions:
            mark = "✅" if a.passed else "❌"
            lines.append(f"{mark} 第 {a.line} 行：{a.text}")
        lines.append("")
    lines += _section("链", chain_table(report))
    lines += _section("差异系数", discrepancy_table(report))
    terms = pullback_terms(report)
    if terms:
        lines.append("=== f*K_X（基 h, e…）===")
        lines.append(" + ".join(f"{fmt(c)} {label}" for label, c in terms))
        lines.append("")
    lines += _section("nef 表", nef_table(report))
    if report.pi1 is not None:
        lines += _section("π1 证书", pi1_trace_table(report))
        if report.pi1.surviving:
            lines.append("⚠️ 未被杀死的节点：" + ", ".join(report.pi1.surviving))
            lines.append("")
    if report.numerology:
        lines.append("=== 数值推论 ===")
        lines += report.numerology
        lines.append("")
    if report.assumptions:
        lines.append("=== 引用的前提 ===")
        lines += [f"- {a}" for a in report.assumptions]
        lines.append("")
    lines += _section("期望检查", expectation_table(report))
    for w in report.warnings:
        lines.append(f"⚠️ {w}")
    return "\n".join(lines).rstrip() + "\n"


# === JSON ===


def _invariants_dict(inv: Optional[FourManifoldInvariants]):
    if inv is None:
        return None
    return {
        "b2_plus": inv.b2_plus,
        "b2_minus": inv.b2_minus,
        "euler": inv.euler,
        "signature": inv.signature,
        "ksq_smooth": inv.ksq_smooth,
    }


def report_to_dict(report: Report) -> dict:
    contraction = None
    if report.contraction is not None:
        c = report.contraction
        contraction = {
            "contracted": list(report.contracted),
            "discrepancies": {e.name: [fmt(d) for d in e.discrepancies] for e in c.chains},
            "pullback": {label: fmt(coeff) for label, coeff in pullback_terms(report)},
            "ksq_x": fmt(c.ksq_singular),
            "nef_table": [{"curve": name, "value": fmt(value)} for name, value in c.nef_table],
            "nef": c.nef,
        }
    smoothing = None
    if report.smoothing is not None:
        s = report.smoothing
        smoothing = {"ksq": fmt(s.ksq), "pg": s.pg, "chi": s.chi, "q_assumed_zero": s.q_assumed_zero}
    pi1 = None
    if report.pi1 is not None:
        pi1 = {
            "passed": report.pi1.passed,
            "trace": [{"rule": t.rule, "witness": t.witness, "detail": t.detail} for t in report.pi1.trace],
            "surviving": report.pi1.surviving,
        }
    return {
        "schema": REPORT_SCHEMA_VERSION,
        "script": report.source,
        "passed": report.passed,
        "surface": {
            "rank": report.rank,
            "ksq_ambient": report.ksq_ambient,
            "assertions": [{"line": a.line, "text": a.text, "passed": a.passed} for a in report.assertions],
        },
        "chains": [
            {
                "name": row.name,
                "curves": list(row.curves),
                "chain": list(row.chain.bs),
                "cpq": None if row.cpq is None else {
                    "p": row.cpq.params.p,
                    "q": row.cpq.params.q,
                    "orientation": row.cpq.orientation,
                    "alternate": None if row.cpq.alternate is None else [row.cpq.alternate.p, row.cpq.alternate.q],
                },
                "tparams": [[t.d, t.n, t.a] for t in row.tparams],
                "lens_order": row.lens_order,
                "negative_definite": row.negative_definite,
                "class_t": row.class_t,
            }
            for row in report.chains
        ],
        "contraction": contraction,
        "topology": {
            "ambient": _invariants_dict(report.ambient),
            "after": _invariants_dict(report.after),
            "smoothing": smoothing,
        },
        "pi1": pi1,
        "numerology": list(report.numerology),
        "assumptions": list(report.assumptions),
        "expectations": [
            {"line": e.line, "key": e.key, "expected": e.expected, "actual": e.actual, "passed": e.passed}
            for e in report.expectations
        ],
        "warnings": list(report.warnings),
    }


def render_json(reports: Sequence[Report]) -> str:
    if len(reports) == 1:
        payload = report_to_dict(reports[0])
    else:
        payload = [report_to_dict(r) for r in reports]
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
