"""
錯誤類型
所有錯誤分成兩類：規格錯誤（exit 2）與求解器錯誤（exit 3）
"""


class MongeAmpereLabError(Exception):
    """專案內所有錯誤的基底類別"""
    exit_code = 1


class SpecError(MongeAmpereLabError):
    """輸入規格、前置條件或參數範圍不合法"""
    exit_code = 2


class SolverError(MongeAmpereLabError):
    """數值求解失敗（發散、找不到根、失去凸性等）"""
    exit_code = 3


# ---- 幾何 ----
class PointNotOnBoundary(SpecError):
    pass


class NotTangent(SpecError):
    pass


class InvalidDomain(SpecError):
    pass


class InvalidPsi(SpecError):
    pass


# ---- 解析解 ----
class OutOfDomain(SpecError):
    pass


class ValidityViolated(SpecError):
    pass


class ParameterOutOfRange(SpecError):
    pass


class BadMu(SpecError):
    pass


class IndexOutOfRange(SpecError):
    pass


class UnsupportedFamily(SpecError):
    pass


# ---- 條件檢查 ----
class GammaZero(SpecError):
    pass


class DenominatorSignError(SpecError):
    pass


class NotIntegrable(SpecError):
    pass


class NoRoot(SpecError):
    pass


class NegativeK(SpecError):
    pass


class StepTooLarge(SpecError):
    pass


# ---- 先驗常數 ----
class KOutOfRange(SpecError):
    pass


class BadDefiningFunction(SpecError):
    pass


class UnsupportedDomain(SpecError):
    pass


class GaugeUndefined(SpecError):
    pass


class SingularHessian(SpecError):
    pass


class MissingFlow(SpecError):
    pass


class RhoTooDeep(SpecError):
    pass


class LambdaOutOfRange(SpecError):
    pass


class GridTooCoarse(SpecError):
    pass


class PreconditionRejected(SpecError):
    pass


# ---- 求解器 ----
class SlopeCollapse(SolverError):
    pass


class StepRejected(SolverError):
    pass


class NoBracket(SolverError):
    pass


class MaxIterations(SolverError):
    pass


class DivergedNonConvex(SolverError):
    pass


class ConvexityLost(SolverError):
    pass


class DeterminantFloor(SolverError):
    pass
