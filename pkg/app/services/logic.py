# [파일 설명]
# - 목적: 3값 논리(0, 1, X)와 조합 셀 기능 평가를 제공한다.
# - 핵심 동작: X는 비관적으로 전파하되 제어 입력(AND의 0)은 X와 무관하게 결정한다.
# - 연관 모듈: event_sim, stimulus, vcd_export
from __future__ import annotations

from collections.abc import Callable
from enum import Enum


# [클래스 설명]
# - 역할: 3값 논리 값. 문자열 enum이라 VCD/자극 파일 토큰("0", "1", "x")과 바로 대응한다.
class LogicValue(str, Enum):
    ZERO = "0"
    ONE = "1"
    X = "x"

    # [함수 설명]
    # - 목적: 토큰 문자열을 LogicValue로(대소문자 무시).
    @classmethod
    def parse(cls, token: str) -> LogicValue:
        return cls(token.lower())

    # [함수 설명]
    # - 목적: 0 또는 1이면 True.
    @property
    def is_known(self) -> bool:
        return self is not LogicValue.X


L0 = LogicValue.ZERO
L1 = LogicValue.ONE
LX = LogicValue.X


# [함수 설명]
# - 목적: 3값 NOT. X는 X.
def v_not(a: LogicValue) -> LogicValue:
    if a is LX:
        return LX
    return L0 if a is L1 else L1


# [함수 설명]
# - 목적: 3값 AND. 한 입력이라도 0이면 X와 무관하게 0이다.
def v_and(a: LogicValue, b: LogicValue) -> LogicValue:
    if a is L0 or b is L0:
        return L0
    if a is L1 and b is L1:
        return L1
    return LX


# [함수 설명]
# - 목적: 3값 XOR. 입력 중 X가 있으면 X.
def v_xor(a: LogicValue, b: LogicValue) -> LogicValue:
    if a is LX or b is LX:
        return LX
    return L1 if a is not b else L0


# [함수 설명]
# - 목적: 비반전 버퍼(CKBUF의 BUF 기능).
def _buf(a: LogicValue) -> LogicValue:
    return a


# [함수 설명]
# - 목적: 3값 NAND = NOT(AND).
def _nand(a: LogicValue, b: LogicValue) -> LogicValue:
    return v_not(v_and(a, b))


# 조합 기능 태그 -> 평가 함수 (입력 핀 순서는 netlist_ir.CELL_INTERFACES와 동일)
COMBINATIONAL: dict[str, Callable[..., LogicValue]] = {
    "INV": v_not,
    "BUF": _buf,
    "AND2": v_and,
    "NAND2": _nand,
    "XOR2": v_xor,
    "LECTOR_AND2": v_and,
    "LECTOR_INV": v_not,
}


# [함수 설명]
# - 목적: 완전한 0<->1 전이인지. X가 끼는 변화는 토글이 아니다.
def is_toggle(old: LogicValue, new: LogicValue) -> bool:
    return old.is_known and new.is_known and old is not new
