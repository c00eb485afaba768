from typing import Dict, List, Callable, Any
import inspect
import json
from functools import wraps
from core.exceptions import CommandError


def _type_name(annotation: Any) -> str:
    if annotation == inspect.Parameter.empty:
        return "Any"
    return getattr(annotation, "__name__", str(annotation))


class CommandRegistry:
    """命令函数注册和管理"""

    def __init__(self):
        self._commands: Dict[str, Callable] = {}
        self._command_descriptions: Dict[str, Dict] = {}

    def register(self, func: Callable = None, *, name: str = None, description: str = None):
        """装饰器：注册命令函数

        Args:
            func: 要注册的函数
            name: 命令名称，如果不提供则使用函数名去掉 cmd_ 前缀
            description: 命令描述，如果不提供则从docstring提取
        """
        def decorator(f: Callable) -> Callable:
            command_name = name or f.__name__.removeprefix("cmd_")

            # 提取函数签名信息
            sig = inspect.signature(f)
            params = {}
            for param_name, param in sig.parameters.items():
                params[param_name] = {
                    "type": _type_name(param.annotation),
                    "required": param.default == inspect.Parameter.empty,
                    "default": param.default if param.default != inspect.Parameter.empty else None
                }

            self._commands[command_name] = f
            self._command_descriptions[command_name] = {
                "name": command_name,
                "description": description or self._extract_description(f),
                "parameters": params,
                "return_type": _type_name(sig.return_annotation)
            }

            @wraps(f)
            def wrapper(*args, **kwargs):
                try:
                    return f(*args, **kwargs)
                except CommandError:
                    raise
                except Exception as e:
                    raise CommandError(f"Command '{command_name}' failed: {str(e)}") from e

            return wrapper

        if func is None:
            return decorator
        else:
            return decorator(func)

    def _extract_description(self, func: Callable) -> str:
        """从函数docstring提取描述信息"""
        if func.__doc__:
            lines = func.__doc__.strip().split('\n')
            return lines[0] if lines else ""
        return f"Command: {func.__name__}"

    def get_command_descriptions(self) -> List[Dict]:
        return list(self._command_descriptions.values())

    def get_command_descriptions_json(self) -> str:
        """获取命令描述的JSON格式字符串"""
        return json.dumps(self.get_command_descriptions(), indent=2, ensure_ascii=False, default=str)

    def execute_command(self, command_name: str, **kwargs) -> Any:
        """执行指定的命令

        Args:
            command_name: 命令名称
            **kwargs: 命令参数

        Returns:
            命令的执行结果

        Raises:
            CommandError: 命令不存在或执行失败，原始异常保存在 cause 中
        """
        if command_name not in self._commands:
            available = list(self._commands.keys())
            raise CommandError(f"Command '{command_name}' not found. Available commands: {available}")

        try:
            return self._commands[command_name](**kwargs)
        except Exception as e:
            raise CommandError(f"Command '{command_name}' failed: {str(e)}") from e

    def list_commands(self) -> List[str]:
        return list(self._commands.keys())

    def has_command(self, command_name: str) -> bool:
        return command_name in self._commands

    def get_command_info(self, command_name: str) -> Dict:
        """获取特定命令的详细信息"""
        if command_name not in self._command_descriptions:
            raise CommandError(f"Command '{command_name}' not found")
        return self._command_descriptions[command_name]

# 创建全局命令注册实例
command_registry = CommandRegistry()
