from typing import Any, Dict, List
import logging

from tools.registry import command_registry
from core.exceptions import (
    CommandError,
    ConfigurationError,
    EmptyCondition,
    EventError,
    ExhaustiveLimitExceeded,
    FieldArithmeticError,
    ModelFileError,
    NapWorkbenchException,
    NotAPopperFunction,
    UsageError,
)
from utils.report_renderer import render_json
from config import Config

# 语义失败 → 1，输入错误 → 2
EXIT_OK = 0
EXIT_SEMANTIC = 1
EXIT_INPUT = 2

_SEMANTIC_ERRORS = (EmptyCondition, NotAPopperFunction, FieldArithmeticError)
_INPUT_ERRORS = (ModelFileError, EventError, UsageError, ExhaustiveLimitExceeded, ConfigurationError)

# 需要统一日志格式的包
_LOGGED_PACKAGES = ("core", "tools", "utils")


def exit_code_for(error: BaseException) -> int:
    """把异常映射为退出码；CommandError 按其原始异常判断，没有原始异常时为未知命令"""
    if isinstance(error, CommandError):
        if error.cause is None:
            return EXIT_INPUT
        error = error.cause
    if isinstance(error, _SEMANTIC_ERRORS):
        return EXIT_SEMANTIC
    if isinstance(error, _INPUT_ERRORS):
        return EXIT_INPUT
    if isinstance(error, (ValueError, TypeError)):
        return EXIT_INPUT
    return EXIT_SEMANTIC


class NapWorkbench:
    """非阿基米德概率工作台：配置、日志与命令调度"""

    def __init__(self, config: Config = None):
        """初始化工作台

        Args:
            config: 配置，不提供时从环境变量与 .env 读取
        """
        self.config = config or Config()
        self.command_registry = command_registry  # 使用全局命令注册实例
        self.logger = self._setup_logger()

        self._register_default_commands()

        self.logger.debug("NapWorkbench initialized")

    def _setup_logger(self) -> logging.Logger:
        """设置日志配置"""
        level = getattr(logging, self.config.log_level)
        formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        for package in _LOGGED_PACKAGES:
            package_logger = logging.getLogger(package)
            package_logger.setLevel(level)
            if not package_logger.handlers:
                handler = logging.StreamHandler()
                handler.setFormatter(formatter)
                package_logger.addHandler(handler)
        return logging.getLogger(__name__)

    def _register_default_commands(self):
        """导入命令模块，触发命令注册"""
        from tools import commands  # noqa: F401
        self.logger.debug(f"Registered {len(self.command_registry.list_commands())} commands")

    def defaults(self, command: str) -> Dict[str, Any]:
        """按命令签名从配置中补齐缺省参数"""
        params = self.command_registry.get_command_info(command)["parameters"]
        candidates = {
            "depth": self.config.default_depth,
            "stages": self.config.stages,
            "output_dir": self.config.output_dir,
            "max_atoms": self.config.max_exhaustive_atoms,
            "allow_large": self.config.allow_large_tables,
        }
        return {k: v for k, v in candidates.items() if k in params}

    def execute(self, command: str, **kwargs):
        """执行命令，未给出的参数使用配置缺省值

        Raises:
            CommandError: 命令不存在或执行失败
        """
        arguments = self.defaults(command) if self.command_registry.has_command(command) else {}
        arguments.update({k: v for k, v in kwargs.items() if v is not None})
        self.logger.info(f"Running command '{command}' with {sorted(arguments)}")
        return self.command_registry.execute_command(command, **arguments)

    def run(self, command: str, fmt: str = "text", **kwargs) -> tuple:
        """执行命令并渲染输出

        Returns:
            (退出码, 输出文本)
        """
        try:
            outcome = self.execute(command, **kwargs)
        except NapWorkbenchException as e:
            code = exit_code_for(e)
            cause = e.cause if isinstance(e, CommandError) and e.cause is not None else e
            self.logger.debug(f"Command '{command}' failed with exit code {code}: {cause}")
            if fmt == "json":
                return code, render_json({"error": type(cause).__name__, "message": str(cause), "exit_code": code})
            return code, f"error: {cause}"
        return outcome.exit_code, outcome.render(fmt)

    def list_commands(self) -> List[str]:
        return self.command_registry.list_commands()

    def get_command_info(self, command: str) -> Dict:
        return self.command_registry.get_command_info(command)
