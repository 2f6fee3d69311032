"""
日志初始化
替换 loguru 默认输出，供 CLI 和套件运行器调用
"""

import sys
from typing import Optional

from loguru import logger

from .config import config


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> None:
    """
    配置 loguru 输出

    Args:
        level: 日志级别，缺省取 config.logging.log_level
        log_file: 可选日志文件路径
    """
    level = (level or config.logging.log_level).upper()
    log_file = log_file or config.logging.log_file

    logger.remove()
    logger.add(sys.stderr, level=level, format="{time:HH:mm:ss} | {level: <7} | {name}:{function} - {message}")
    if log_file:
        logger.add(log_file, level=level, rotation="10 MB")
    logger.debug(f"Logging configured at level {level}")
