from typing import List, Literal
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings


class Config(BaseSettings):
    """应用配置类，使用Pydantic Settings"""

    # 日志配置
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="WARNING", description="日志级别"
    )

    # 穷举检查配置
    max_exhaustive_atoms: int = Field(default=10, description="穷举检查 Popper 公理时允许的最大原子数")
    allow_large_tables: bool = Field(default=False, description="是否忽略原子数上限")

    # 查询配置
    default_depth: int = Field(default=2, description="query/decompose 默认展开级数")
    default_stages: str = Field(default="2,4,8,16", description="snapshot 默认阶段列表")

    # 输出配置
    output_dir: str = Field(default="output", description="输出目录")

    @field_validator("max_exhaustive_atoms")
    @classmethod
    def validate_max_exhaustive_atoms(cls, v):
        if v < 1 or v > 16:
            raise ValueError("穷举原子数上限必须在1到16之间")
        return v

    @field_validator("default_depth")
    @classmethod
    def validate_default_depth(cls, v):
        if v < 1 or v > 64:
            raise ValueError("展开级数必须在1到64之间")
        return v

    @field_validator("default_stages")
    @classmethod
    def validate_default_stages(cls, v):
        parse_stages(v)
        return v

    @property
    def stages(self) -> List[int]:
        return parse_stages(self.default_stages)

    class Config:
        env_file = ".env"
        env_prefix = "NAP_"
        case_sensitive = False
        env_file_encoding = "utf-8"


def parse_stages(text: str) -> List[int]:
    """解析 "2,4,8" 形式的阶段列表，每个阶段至少为 2"""
    try:
        stages = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ValueError(f"阶段列表必须是逗号分隔的整数: {text!r}") from e
    if not stages:
        raise ValueError("阶段列表不能为空")
    for n in stages:
        if n < 2:
            raise ValueError(f"阶段必须至少为2: {n}")
    return stages
