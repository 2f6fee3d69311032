"""
异常定义
所有模块共用的异常层次结构
"""


class HierTreeError(Exception):
    """本库所有异常的基类"""


class InvalidAddressError(HierTreeError):
    """顶点地址格式错误（标签 < 1 或文本无法解析）"""


class DomainError(HierTreeError):
    """参数不在运算的定义域内"""


class InvalidSpheromorphismError(HierTreeError):
    """球同构数据未通过 validate"""

    def __init__(self, diagnostic: str):
        super().__init__(diagnostic)
        self.diagnostic = diagnostic


class NeedMoreDigits(HierTreeError):
    """前缀太短，无法确定边界柱集的像"""

    def __init__(self, required: int):
        super().__init__(f"Need at least {required} more digits")
        self.required = required


class BiTreeError(HierTreeError):
    """双树输入无效或锚点不匹配"""


class ThompsonError(HierTreeError):
    """Thompson 元素不连续、反向或弧划分有误"""


class KernelError(HierTreeError):
    """核函数数值检查的输入无效"""


class SerializationError(HierTreeError):
    """JSON 导入格式错误"""
