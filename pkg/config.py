from pathlib import Path

# === 脚本语法关键字 ===
SCRIPT_KEYWORDS = (
    "surface",
    "curve",
    "blowup",
    "chain",
    "assert",
    "connects",
    "contract",
    "expect",
)

# 目前只支持射影平面
SURFACE_KINDS = ("p2",)

# 保留符号：超平面类 / 典范类
RESERVED_NAMES = ("h", "K")

# === expect 键 → 值类型 ===
# int: 整数；rational: 分数；bool: true/false；verdict: pass/fail；
# rationals: [q, ...]；pair: (a, b)；rclass: 有理系数类表达式
EXPECT_KEYS = {
    "ksq_ambient": "int",
    "ksq_x": "rational",
    "ksq_smooth": "int",
    "nef": "bool",
    "pi1": "verdict",
    "rank": "int",
    "pg": "int",
    "chi": "int",
    "chi2k": "int",
    "b2": "pair",
    "pullback": "rclass",
    # 以下键带一个名字参数
    "discrepancy": "rationals",
    "nefval": "rational",
    "cpq": "pair",
}

# 需要名字参数的 expect 键（名字 → 所指对象）
NAMED_EXPECT_KEYS = {
    "discrepancy": "chain",
    "nefval": "curve",
    "cpq": "chain",
}

# === 系数上限：超出即报错，不允许静默溢出 ===
COEFF_LIMIT = 2**31 - 1

# === 报告 ===
REPORT_SCHEMA_VERSION = 1

CHAIN_TABLE_COLUMNS = {
    "name": "链",
    "chain": "b 序列",
    "cpq": "C(p,q)",
    "orientation": "方向",
    "tparams": "(d,n,a)",
    "lens_order": "透镜阶",
    "negative_definite": "负定",
    "class_t": "T 类",
}

DISCREPANCY_TABLE_COLUMNS = {
    "chain": "链",
    "curve": "曲线",
    "self_intersection": "自交",
    "discrepancy": "差异系数",
}

NEF_TABLE_COLUMNS = {
    "curve": "曲线",
    "value": "f*K·C",
}

EXPECT_TABLE_COLUMNS = {
    "line": "行",
    "key": "键",
    "expected": "期望",
    "actual": "实际",
    "passed": "通过",
}

PI1_TRACE_COLUMNS = {
    "step": "步",
    "rule": "规则",
    "edge": "见证曲线",
    "detail": "说明",
}

SHEET_NAMES = {
    "summary": "概要",
    "chains": "链表",
    "discrepancies": "差异系数",
    "nef": "nef 表",
    "pi1": "π1 证书",
    "expectations": "期望检查",
}

# 引用的前提（报告里始终标出）
CITED_ASSUMPTIONS = {
    "simply_connected": "ambient rational surface is simply connected",
    "ball_surjective": "pi1(boundary of B_pq) -> pi1(B_pq) is surjective",
    "q_zero": "irregularity q = 0 of the smoothing",
    "smoothing_exists": "a Q-Gorenstein smoothing of the contracted surface exists",
    "nef_scope": "nefness checked only against registered curves",
}

# === 控制台颜色 ===
NO_COLOR_ENV = "RBD_NO_COLOR"

STATUS_COLORS = {
    "success": "\033[32m",
    "info": "\033[36m",
    "warning": "\033[33m",
    "error": "\033[31m",
    "reset": "\033[0m",
}

STATUS_ICONS = {
    "success": "✅",
    "info": "ℹ️",
    "warning": "⚠️",
    "error": "❌",
}

# === 内置构造脚本 ===
CONSTRUCTIONS_DIR = Path(__file__).resolve().parent / "constructions"

BUNDLED_CONSTRUCTIONS = {
    "main": "main.rbd",
    "e7": "e7.rbd",
    "appendix_a1": "appendix_a1.rbd",
    "appendix_a2": "appendix_a2.rbd",
    "nodal": "nodal.rbd",
    "enriques": "enriques.rbd",
}
