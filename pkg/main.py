#!/usr/bin/env python3
"""
NAP Workbench - 有限样本空间上的非阿基米德概率与 Popper 函数工作台

使用方法:
    python main.py check models/two_ranks.json
    python main.py query models/two_ranks.json --event "b" --depth 3
    python main.py compare models/two_ranks.json --event "a" --event "b"
    python main.py convert models/table.json --to nap --out output/table.nap.json
    python main.py snapshot models/table.json --stages 2,4,8 --plot auto
    python main.py --list-commands
"""

import argparse
import sys

from config import parse_stages
from core.exceptions import ConfigurationError
from core.workbench import EXIT_INPUT, NapWorkbench


def _stages(text: str):
    try:
        return parse_stages(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("text", "json"), default="text", help="输出格式")
    common.add_argument("--allow-large", action="store_true", default=None, help="忽略穷举检查的原子数上限")

    parser = argparse.ArgumentParser(description="NAP Workbench - 非阿基米德概率工作台")
    parser.add_argument("--list-commands", action="store_true", help="列出所有可用命令")
    parser.set_defaults(fmt="text")
    sub = parser.add_subparsers(dest="command")

    check = sub.add_parser("check", help="检查模型文件", parents=[common])
    check.add_argument("path")

    query = sub.add_parser("query", help="查询概率或条件概率", parents=[common])
    query.add_argument("path")
    query.add_argument("--event", required=True)
    query.add_argument("--given")
    query.add_argument("--depth", type=int)
    query.add_argument("--approx", action="store_true")

    decompose = sub.add_parser("decompose", help="按秩分解概率值", parents=[common])
    decompose.add_argument("path")
    decompose.add_argument("--event", required=True)
    decompose.add_argument("--depth", type=int)

    compare = sub.add_parser("compare", help="比较两个事件的概率", parents=[common])
    compare.add_argument("path")
    compare.add_argument("--event", action="append", required=True, help="给出两次")
    compare.add_argument("--given")

    convert = sub.add_parser("convert", help="NAP 模型与 Popper 表互相转换", parents=[common])
    convert.add_argument("path")
    convert.add_argument("--to", choices=("nap", "popper"), required=True)
    convert.add_argument("--out")

    snapshot = sub.add_parser("snapshot", help="快照序列收敛检验", parents=[common])
    snapshot.add_argument("path")
    snapshot.add_argument("--stages", type=_stages)
    snapshot.add_argument("--event")
    snapshot.add_argument("--given")
    snapshot.add_argument("--plot", help="图片路径，auto 表示自动命名")
    snapshot.add_argument("--approx", action="store_true")

    spectrum = sub.add_parser("spectrum", help="列出事件的秩与闭包深度", parents=[common])
    spectrum.add_argument("path")
    return parser


def command_arguments(args: argparse.Namespace) -> dict:
    """把命令行参数转换为命令函数的关键字参数"""
    kwargs = {k: v for k, v in vars(args).items() if k not in ("command", "fmt", "list_commands")}
    if args.command == "compare":
        events = kwargs.pop("event")
        if len(events) != 2:
            raise ConfigurationError("compare needs exactly two --event expressions")
        kwargs["left"], kwargs["right"] = events
    if "approx" in kwargs and not kwargs["approx"]:
        kwargs.pop("approx")
    return kwargs


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        workbench = NapWorkbench()
    except (ConfigurationError, ValueError) as e:
        print(f"❌ 配置错误: {e}", file=sys.stderr)
        return EXIT_INPUT

    if args.list_commands:
        print("📋 可用命令列表:")
        for name in workbench.list_commands():
            print(f"  • {name}: {workbench.get_command_info(name)['description']}")
        return 0

    if not args.command:
        parser.print_help()
        return EXIT_INPUT

    try:
        kwargs = command_arguments(args)
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT

    code, text = workbench.run(args.command, args.fmt, **kwargs)
    print(text, file=sys.stderr if text.startswith("error:") else sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
