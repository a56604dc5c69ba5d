import argparse
import os
import sys

from config import NO_COLOR_ENV, STATUS_COLORS, STATUS_ICONS


def use_color(stream=None) -> bool:
    stream = stream or sys.stderr
    if os.environ.get(NO_COLOR_ENV):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _status(kind: str, message: str, stream=None):
    stream = stream or sys.stderr
    text = f"{STATUS_ICONS[kind]} {message}"
    if use_color(stream):
        text = f"{STATUS_COLORS[kind]}{text}{STATUS_COLORS['reset']}"
    print(text, file=stream)


def success(message: str, stream=None):
    _status("success", message, stream)


def info(message: str, stream=None):
    _status("info", message, stream)


def warning(message: str, stream=None):
    _status("warning", message, stream)


def error(message: str, stream=None):
    _status("error", message, stream)


def strip_icon(message: str) -> str:
    """去掉异常信息里自带的 ❌/⚠️ 前缀，避免重复图标。"""
    for icon in STATUS_ICONS.values():
        if message.startswith(icon):
            return message[len(icon):].lstrip()
    return message


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbd",
        description="有理爆缩构造的精确验证：执行爆破脚本、识别 T 类链、求差异系数并核对不变量",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    # 📄 verify
    verify = sub.add_parser("verify", help="运行一个或多个构造脚本")
    verify.add_argument("files", nargs="+", help=".rbd 脚本路径")
    verify.add_argument("--json", dest="json_out", metavar="OUT", help="写出 JSON 报告（'-' 表示标准输出）")
    verify.add_argument("--xlsx", dest="xlsx_out", metavar="OUT", help="写出 Excel 报告")
    verify.add_argument("--quiet", action="store_true", help="不打印文本报告")

    # 🔗 chain
    chain = sub.add_parser("chain", help="打印 C(p,q) 链与透镜阶")
    chain.add_argument("p", type=int)
    chain.add_argument("q", type=int)

    # 🔍 tclass
    tclass = sub.add_parser("tclass", help="判断一条链是否为 T 类")
    tclass.add_argument("bs", nargs="+", type=int, metavar="b")

    # 📋 enum-t
    enum_t = sub.add_parser("enum-t", help="枚举 T 类链")
    enum_t.add_argument("--max-len", type=int, required=True)
    enum_t.add_argument("--max-b", type=int, required=True)

    return parser
