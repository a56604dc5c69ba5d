import sys
from pathlib import Path

from chain_utils import (
    Chain,
    ChainError,
    CpqParams,
    cpq_chain,
    enumerate_T_with_origin,
    is_class_T,
    is_rdp_chain,
    recognize_cpq,
    t_params,
)
from excel_utils import write_report_workbook
from rbd_processor import RbdProcessor, RunError
from report_utils import render_json, render_text
from script_parser import ScriptError
from topology_utils import lens_order
import ui

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def run_verify(args) -> int:
    processor = RbdProcessor(verbose=not args.quiet)
    # JSON 写到标准输出时不再打印文本报告
    quiet = args.quiet or args.json_out == "-"
    reports = []
    code = EXIT_OK
    for file in args.files:
        try:
            report = processor.process_file(file)
        except ScriptError as e:
            ui.error(f"{file}：{ui.strip_icon(str(e))}")
            code = max(code, EXIT_USAGE)
            continue
        except RunError as e:
            ui.error(f"{file}：{ui.strip_icon(str(e))}")
            code = max(code, EXIT_FAILED)
            continue
        except OSError as e:
            ui.error(f"无法读取 {file}：{e}")
            code = max(code, EXIT_USAGE)
            continue

        reports.append(report)
        if not quiet:
            sys.stdout.write(render_text(report))
        if report.passed:
            ui.success(f"{file} 全部检查通过")
        else:
            failed = [e for e in report.expectations if not e.passed]
            ui.error(f"{file} 有 {len(failed)} 条 expect 未通过")
            code = max(code, EXIT_FAILED)

    if args.json_out and reports:
        text = render_json(reports)
        if args.json_out == "-":
            sys.stdout.write(text)
        else:
            Path(args.json_out).write_text(text, encoding="utf-8")
            ui.info(f"JSON 报告已写入 {args.json_out}")
    if args.xlsx_out and reports:
        write_report_workbook(reports, args.xlsx_out)
        ui.info(f"Excel 报告已写入 {args.xlsx_out}")
    return code


def run_chain(args) -> int:
    try:
        chain = cpq_chain(CpqParams(args.p, args.q))
    except ChainError as e:
        ui.error(ui.strip_icon(str(e)))
        return EXIT_USAGE
    print(f"{chain}  lens order {lens_order(chain)}")
    return EXIT_OK


def run_tclass(args) -> int:
    try:
        chain = Chain(tuple(args.bs))
    except ChainError as e:
        ui.error(ui.strip_icon(str(e)))
        return EXIT_USAGE
    if not is_class_T(chain):
        suffix = "（rational double point）" if is_rdp_chain(chain) else ""
        print(f"not class T{suffix}")
        return EXIT_OK
    parts = ["class T", "(d,n,a)=" + " ".join(str(t) for t in t_params(chain))]
    match = recognize_cpq(chain)
    if match is not None:
        text = str(match.params)
        parts.append(text if match.orientation == "as-given" else f"{text} reversed")
    print("; ".join(parts))
    return EXIT_OK


def run_enum_t(args) -> int:
    try:
        found = enumerate_T_with_origin(args.max_len, args.max_b)
    except ChainError as e:
        ui.error(ui.strip_icon(str(e)))
        return EXIT_USAGE
    for chain, from_j0 in found:
        print(f"{chain}  j0" if from_j0 else str(chain))
    return EXIT_OK


COMMANDS = {
    "verify": run_verify,
    "chain": run_chain,
    "tclass": run_tclass,
    "enum-t": run_enum_t,
}


def main(argv=None) -> int:
    args = ui.build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception as e:
        import traceback
        print("❌ rbd crashed:", e, file=sys.stderr)
        traceback.print_exc()
        sys.exit(EXIT_FAILED)
