"""
配置管理模块
使用Pydantic Settings进行类型安全的配置管理
"""

from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field
from typing import Optional
from pathlib import Path

# 确保加载项目根目录的 .env 文件
from dotenv import load_dotenv

# 获取项目根目录（config.py 的父目录的父目录）
PROJECT_ROOT = Path(__file__).parent.parent
ENV_FILE = PROJECT_ROOT / ".env"

# 仅用于本地开发覆盖默认值；CLI 参数优先于这里的设置
load_dotenv(ENV_FILE, override=False)


class NumericsConfig(BaseSettings):
    """核函数数值验证配置"""
    model_config = SettingsConfigDict(extra='ignore')

    # 数值秩阈值：奇异值 > tol·σ_max 才计入秩
    rank_tol: float = Field(default=1e-9)
    # 半正定检查：最小特征值 ≥ −psd_tol
    psd_tol: float = Field(default=1e-10)
    # 最近点分解逐项比较的容差
    factorization_tol: float = Field(default=1e-12)
    # 采样顶点的最大深度，避免 λ^d 下溢
    max_sample_depth: int = Field(default=12)
    # 每个分支采样的顶点数
    samples_per_piece: int = Field(default=20)


class CFConfig(BaseSettings):
    """连分数与边界检查配置"""
    model_config = SettingsConfigDict(extra='ignore')

    cf_oracle_depth: int = Field(default=12)
    cf_tail_depth: int = Field(default=40)
    cf_tail_max_shift: int = Field(default=10)


class SuiteSettings(BaseSettings):
    """性质测试套件默认参数"""
    model_config = SettingsConfigDict(extra='ignore')

    suite_seed: int = Field(default=20240101)
    suite_trials: int = Field(default=100)
    suite_max_cuts: int = Field(default=4)
    suite_max_subtree_size: int = Field(default=4)
    suite_max_depth: int = Field(default=3)


class LoggingConfig(BaseSettings):
    """日志配置"""
    model_config = SettingsConfigDict(extra='ignore')

    log_level: str = Field(default="INFO")
    log_file: Optional[str] = Field(default=None)


class Config(BaseSettings):
    """主配置类 - 聚合所有子配置"""
    model_config = SettingsConfigDict(extra='ignore')

    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    cf: CFConfig = Field(default_factory=CFConfig)
    suite: SuiteSettings = Field(default_factory=SuiteSettings)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


# 全局配置实例
config = Config()
