from typing import Iterable, Optional


class NapWorkbenchException(Exception):
    """工作台基础异常"""
    pass

class FieldArithmeticError(NapWorkbenchException):
    """ℚ(ε) 域运算相关错误"""
    pass

class DivisionByZero(FieldArithmeticError):
    """除数为零"""
    pass

class InfiniteValue(FieldArithmeticError):
    """对无穷大元素取标准部分"""
    pass

class FieldValueSyntaxError(FieldArithmeticError):
    """域元素文本无法解析"""

    def __init__(self, message: str, position: int = 0):
        super().__init__(message)
        self.position = position

class EventError(NapWorkbenchException):
    """事件相关错误"""
    pass

class EmptyCondition(EventError):
    """条件事件为空集"""
    pass

class InvalidPartition(EventError):
    """划分不满足两两不交或并集不等于目标事件"""
    pass

class UnboundAtom(EventError):
    """事件表达式中存在未绑定的原子"""

    def __init__(self, label: str):
        super().__init__(f"Unbound atom '{label}'")
        self.label = label

class EventSyntaxError(EventError):
    """事件表达式语法错误，附带位置和期望的记号集合"""

    def __init__(self, message: str, position: int, expected: Optional[Iterable[str]] = None):
        self.position = position
        self.expected = sorted(set(expected or ()))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at position {position}{detail}")

class NotAPopperFunction(NapWorkbenchException):
    """条件概率表不满足 Popper 公理或正则性约定"""
    pass

class ExhaustiveLimitExceeded(NapWorkbenchException):
    """穷举检查的原子数超过上限"""
    pass

class ModelFileError(NapWorkbenchException):
    """模型文件解析或模式校验错误"""
    pass

class CommandError(NapWorkbenchException):
    """命令执行相关错误"""

    @property
    def cause(self) -> Optional[BaseException]:
        return self.__cause__

class ConfigurationError(NapWorkbenchException):
    """配置相关错误"""
    pass

class UsageError(NapWorkbenchException):
    """命令参数不合法"""
    pass
