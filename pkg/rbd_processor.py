"""
脚本执行：按顺序执行构造语句，然后跑链检查、收缩、拓扑记账、π₁ 证书和 expect 检查。
"""
from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

from chain_utils import is_class_T, is_rdp_chain, recognize_cpq, t_params
from config import CITED_ASSUMPTIONS, EXPECT_KEYS
from contraction_utils import (
    ChainContraction,
    ContractionReport,
    chain_matrix,
    is_negative_definite,
    nef_report,
    pullback_canonical,
)
from lattice_utils import pair
from report_utils import AssertionResult, ChainRow, ExpectationResult, Report, fmt, pullback_terms
from script_parser import (
    AssertStmt,
    BlowupStmt,
    ChainStmt,
    ConnectsStmt,
    CurveStmt,
    ExpectStmt,
    Script,
    SurfaceStmt,
    decode_script,
    format_expect_value,
    format_terms,
    parse_script,
)
from surface_builder import (
    SurfaceState,
    add_curve,
    assert_equal_class,
    begin_plane,
    blow_up,
    chain_check,
    check_disjoint,
    combination_class,
    declare_chain,
)
from topology_utils import (
    FourManifoldInvariants,
    Pi1Certificate,
    Pi1Edge,
    SmoothingRecord,
    blowdown_invariants,
    chi_2K,
    graph_from_orders,
    lens_order,
    noether_ok,
    pi1_certificate,
    smoothing_invariants,
)
import ui


class RunError(ValueError):
    """执行某条语句时出错；带上该语句的行号。"""

    def __init__(self, message: str, line: int):
        super().__init__(f"❌ 第 {line} 行：{ui.strip_icon(message)}")
        self.line = line
        self.reason = ui.strip_icon(message)


Actual = tuple[str, bool]
UNAVAILABLE: Actual = ("n/a", False)


class RbdProcessor:
    def __init__(self, verbose: bool = False):
        self.verbose = verbose

    def _info(self, message: str):
        if self.verbose:
            ui.info(message)

    def process_file(self, path: Union[str, Path]) -> Report:
        path = Path(path)
        text = decode_script(path.read_bytes())
        return self.process(parse_script(text, source=str(path)))

    def process(self, script: Script) -> Report:
        """
        执行整份脚本。

        参数：
            script: parse_script 的结果
        返回：
            Report；断言和 expect 失败只记录在报告里，模块错误抛 RunError
        """
        # === 构造 ===
        state, assertions = self._build(script)
        self._info(f"已完成构造：秩 {state.lattice_rank}，K² = {state.ksq()}")

        ambient = FourManifoldInvariants(1, state.lattice_rank - 1)
        report = Report(
            source=script.source,
            rank=state.lattice_rank,
            ksq_ambient=state.ksq(),
            basis_labels=_basis_labels(state),
            ambient=ambient,
            assertions=assertions,
        )

        # === 链表 ===
        for stmt in script.of_type(ChainStmt):
            report.chains.append(self._chain_row(state, stmt))

        # === 收缩 ===
        contract = script.contract
        connects = script.of_type(ConnectsStmt)
        if contract is None:
            report.warnings.append("没有 contract 语句：跳过收缩、手术记账和 π1 证书")
            if connects:
                raise RunError("connects 需要 contract 语句", connects[0].line)
        else:
            report.contracted = contract.chains
            chains = {name: state.declared_chains[name] for name in contract.chains}
            try:
                check_disjoint(state, list(contract.chains))
                pullback = pullback_canonical(state, chains)
                report.contraction = nef_report(state, chains, pullback)
            except ValueError as exc:
                raise RunError(str(exc), contract.line) from exc
            self._info(f"已收缩 {len(chains)} 条链，K²_X = {report.contraction.ksq_singular}")
            report.assumptions.append(CITED_ASSUMPTIONS["nef_scope"])
            for name, value in report.contraction.nef_table:
                if value < 0:
                    report.warnings.append(f"f*K_X·{name} = {value} < 0")

            # === 拓扑 ===
            self._topology(report, contract.line)
            if connects:
                report.pi1 = self._pi1(state, report, connects)
                if report.pi1.passed:
                    report.assumptions.append(CITED_ASSUMPTIONS["simply_connected"])
                    report.assumptions.append(CITED_ASSUMPTIONS["ball_surjective"])
            report.numerology = _numerology(report)

        # === expect ===
        for stmt in script.of_type(ExpectStmt):
            actual, passed = self._evaluate(stmt, state, report)
            report.expectations.append(
                ExpectationResult(
                    line=stmt.line,
                    key=stmt.key if stmt.arg is None else f"{stmt.key} {stmt.arg}",
                    expected=format_expect_value(EXPECT_KEYS[stmt.key], stmt.value),
                    actual=actual,
                    passed=passed,
                )
            )
        return report

    def _build(self, script: Script) -> tuple[SurfaceState, list[AssertionResult]]:
        state = begin_plane()
        assertions = []
        for stmt in script.statements:
            try:
                if isinstance(stmt, SurfaceStmt):
                    state = begin_plane()
                elif isinstance(stmt, CurveStmt):
                    state = add_curve(state, stmt.name, combination_class(state, stmt.terms))
                elif isinstance(stmt, BlowupStmt):
                    state = blow_up(state, stmt.name, dict(stmt.incidences))
                elif isinstance(stmt, ChainStmt):
                    state = declare_chain(state, stmt.name, stmt.curves)
                elif isinstance(stmt, AssertStmt):
                    passed = assert_equal_class(state, stmt.lhs, stmt.rhs)
                    text = f"{format_terms(stmt.lhs)} == {format_terms(stmt.rhs)}"
                    assertions.append(AssertionResult(stmt.line, text, passed))
                    if not passed:
                        self._info(f"断言失败（第 {stmt.line} 行）：{text}")
            except ValueError as exc:
                raise RunError(str(exc), stmt.line) from exc
        return state, assertions

    def _chain_row(self, state: SurfaceState, stmt: ChainStmt) -> ChainRow:
        try:
            chain = chain_check(state, stmt.name)
            classes = [state.curve(n) for n in stmt.curves]
            class_t = is_class_T(chain)
            return ChainRow(
                name=stmt.name,
                curves=stmt.curves,
                chain=chain,
                cpq=recognize_cpq(chain),
                tparams=tuple(t_params(chain)) if class_t else (),
                lens_order=lens_order(chain),
                negative_definite=is_negative_definite(chain_matrix(classes)),
                class_t=class_t,
            )
        except ValueError as exc:
            raise RunError(str(exc), stmt.line) from exc

    def _topology(self, report: Report, line: int):
        lengths = []
        smoothable = True
        for entry in report.contraction.chains:
            length = _effective_length(entry)
            if length is None:
                smoothable = False
                report.warnings.append(f"链 {entry.name} {entry.chain} 不是 T 类，没有可替换的有理球")
                length = len(entry.chain)
            lengths.append(length)
        try:
            report.after = blowdown_invariants(report.ambient, lengths)
            if smoothable:
                report.smoothing = smoothing_invariants(report.contraction.ksq_singular, lengths, report.ambient)
        except ValueError as exc:
            raise RunError(str(exc), line) from exc
        if report.smoothing is not None:
            report.warnings.extend(ui.strip_icon(w) for w in report.smoothing.warnings)
            report.assumptions.append(CITED_ASSUMPTIONS["smoothing_exists"])
            report.assumptions.append(CITED_ASSUMPTIONS["q_zero"])

    def _pi1(self, state: SurfaceState, report: Report, connects: list[ConnectsStmt]) -> Pi1Certificate:
        contracted = dict(zip(report.contracted, (state.declared_chains[n] for n in report.contracted)))
        orders = {entry.name: lens_order(entry.chain) for entry in report.contraction.chains}
        edges = []
        for stmt in connects:
            for node, attach in ((stmt.node_a, stmt.attach_a), (stmt.node_b, stmt.attach_b)):
                if node not in contracted:
                    raise RunError(f"connects 引用了未被收缩的链：{node}", stmt.line)
                _check_witness(state, stmt, contracted[node], node, attach)
            edges.append(
                Pi1Edge(stmt.witness, stmt.node_a, stmt.node_b, stmt.attach_a, stmt.attach_b, stmt.power)
            )
        certificate = pi1_certificate(graph_from_orders(orders, edges))
        if certificate.passed:
            self._info("π1 证书通过")
        else:
            self._info("π1 证书未通过：" + ", ".join(certificate.surviving))
        return certificate

    def _evaluate(self, stmt: ExpectStmt, state: SurfaceState, report: Report) -> Actual:
        actual = self._actual_value(stmt, state, report)
        if actual is None:
            return UNAVAILABLE
        if stmt.key == "pullback":
            wanted = combination_class(state, stmt.value)
            text = " + ".join(f"{fmt(c)} {label}" for label, c in pullback_terms(report)) or "0"
            return text, report.contraction.pullback == wanted
        if EXPECT_KEYS[stmt.key] == "rationals":
            return fmt(actual), tuple(actual) == tuple(stmt.value)
        text = format_expect_value(EXPECT_KEYS[stmt.key], actual)
        return text, actual == stmt.value

    def _actual_value(self, stmt: ExpectStmt, state: SurfaceState, report: Report):
        """取 expect 键对应的实际值；无法计算时返回 None。"""
        contraction: Optional[ContractionReport] = report.contraction
        smoothing: Optional[SmoothingRecord] = report.smoothing
        key = stmt.key
        if key == "ksq_ambient":
            return state.ksq()
        if key == "rank":
            return state.lattice_rank
        if key == "cpq":
            row = report.chain_row(stmt.arg)
            if row is None or row.cpq is None:
                return None
            return (row.cpq.params.p, row.cpq.params.q)
        if key == "pi1":
            return None if report.pi1 is None else ("pass" if report.pi1.passed else "fail")
        if contraction is None:
            return None
        if key == "ksq_x":
            return contraction.ksq_singular
        if key == "nef":
            return contraction.nef
        if key == "pullback":
            return contraction.pullback
        if key == "discrepancy":
            if stmt.arg not in report.contracted:
                return None
            return contraction.discrepancy_of(stmt.arg)
        if key == "nefval":
            return dict(contraction.nef_table).get(stmt.arg)
        if key == "ksq_smooth":
            return None if report.after is None else report.after.ksq_smooth
        if key == "b2":
            return None if report.after is None else (report.after.b2_plus, report.after.b2_minus)
        if smoothing is None:
            return None
        if key == "pg":
            return smoothing.pg
        if key == "chi":
            return smoothing.chi
        if key == "chi2k":
            if smoothing.ksq.denominator != 1:
                return None
            return chi_2K(smoothing.chi, int(smoothing.ksq))
        return None


def _basis_labels(state: SurfaceState) -> tuple[str, ...]:
    ordered = sorted(state.basis_index.items(), key=lambda item: item[1])
    return ("h",) + tuple(name for name, _ in ordered)


def _effective_length(entry: ChainContraction) -> Optional[int]:
    """
    手术中去掉的 b₂⁻：RDP 链为 0（Milnor 纤维的 b₂ 等于链长），
    T 类链为 len − (d − 1)，其余链返回 None。
    """
    if is_rdp_chain(entry.chain):
        return 0
    if not entry.class_t or not entry.tparams:
        return None
    return len(entry.chain) - (entry.tparams[0].d - 1)


def _check_witness(state: SurfaceState, stmt: ConnectsStmt, curves: tuple[str, ...], node: str, attach: str):
    """见证曲线必须不在链上，并且在声明的位置（端点 / 中间）与链相交。"""
    if stmt.witness in curves:
        raise RunError(f"见证曲线 {stmt.witness} 属于链 {node}", stmt.line)
    witness = state.curve(stmt.witness)
    met = [i for i, name in enumerate(curves) if pair(witness, state.curve(name)) > 0]
    if not met:
        raise RunError(f"见证曲线 {stmt.witness} 与链 {node} 不相交", stmt.line)
    ends = {0, len(curves) - 1}
    if attach == "end" and not any(i in ends for i in met):
        raise RunError(f"见证曲线 {stmt.witness} 不经过链 {node} 的端点", stmt.line)
    if attach == "mid" and not any(i not in ends for i in met):
        raise RunError(f"见证曲线 {stmt.witness} 不经过链 {node} 的中间曲线", stmt.line)


def _numerology(report: Report) -> list[str]:
    lines = []
    contraction = report.contraction
    if contraction is not None:
        removed = contraction.ksq_singular - report.ksq_ambient
        lines.append(f"K²_X − K² = {fmt(contraction.ksq_singular)} − ({report.ksq_ambient}) = {fmt(removed)}")
    if report.after is not None:
        lines.append(
            f"(b2+, b2-) = ({report.after.b2_plus}, {report.after.b2_minus})，"
            f"2e + 3σ = {report.after.ksq_smooth}"
        )
    s = report.smoothing
    if s is None:
        return lines
    if s.ksq.denominator != 1:
        lines.append(f"⚠️ K² = {fmt(s.ksq)} 不是整数，不做一般纤维的数值推论")
        return lines
    ksq = int(s.ksq)
    lines.append(f"一般纤维：K² = {ksq}，p_g = {s.pg}，χ(O) = {s.chi}（假设 q = 0）")
    mark = "✅" if noether_ok(s.pg, ksq) else "❌"
    lines.append(f"{mark} Noether：2·p_g = {2 * s.pg} ≤ K² + 4 = {ksq + 4}")
    lines.append(f"χ(2K) = χ(O) + K² = {chi_2K(s.chi, ksq)}")
    if ksq > 0 and s.pg == 0 and contraction is not None and contraction.nef:
        lines.append("推论：K_X nef 且 K² > 0，一般纤维为 p_g = 0 的一般型曲面（依赖引用的前提）")
    return lines
