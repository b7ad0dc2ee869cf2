# [파일 설명]
# - 목적: cgforge 전 모듈이 공유하는 예외 계층을 정의한다.
# - 제공 기능: 안정적인 에러 코드와 CLI 종료 코드를 함께 가지는 예외 클래스들.
# - 입력/출력: 서비스 레이어가 raise 하고, CLI/HTTP 레이어가 code/exit_code로 변환한다.
# - 주의 사항: validate()는 예외 대신 Diagnostic 목록을 반환한다.
# - 연관 모듈: app.cli, app.api.cg
from __future__ import annotations

EXIT_OK = 0
EXIT_ANALYSIS = 1
EXIT_USAGE = 2
EXIT_INPUT = 3


# [클래스 설명]
# - 역할: 모든 cgforge 예외의 기반. code(안정 식별자), exit_code(CLI 종료 코드), message를 가진다.
# - 사용 위치: 서비스 레이어 전반. cli.main과 api.cg가 한 곳에서 변환한다.
# - 핵심 동작: stage는 파이프라인이 실패한 단계 이름을 붙일 때만 채워진다.
class CgError(Exception):
    code = "CG_ERROR"
    exit_code = EXIT_ANALYSIS

    # [함수 설명]
    # - 목적: 메시지와 선택적 코드 덮어쓰기로 예외를 만든다.
    def __init__(self, message: str, *, code: str | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.stage: str | None = None
        if code is not None:
            self.code = code

    # [함수 설명]
    # - 목적: HTTP 응답 본문용 {"code", "message"} dict.
    def to_dict(self) -> dict[str, str]:
        return {"code": self.code, "message": self.message}


# [클래스 설명]
# - 역할: 넷리스트 텍스트 문법 오류. 줄/열 위치를 메시지와 속성에 담는다.
class NetlistSyntaxError(CgError):
    code = "NETLIST_SYNTAX"
    exit_code = EXIT_INPUT

    # [함수 설명]
    # - 목적: "(line N, column M)" 위치를 메시지 끝에 붙인다.
    def __init__(self, message: str, *, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


# [클래스 설명]
# - 역할: 구조 오류. 알 수 없는 셀, 미연결 핀, 중복 인스턴스, 다중 드라이버, 조합 루프.
class NetlistError(CgError):
    code = "NETLIST_INVALID"
    exit_code = EXIT_INPUT


# [클래스 설명]
# - 역할: 라이브러리 프로파일 읽기/검증 실패.
class ProfileError(CgError):
    code = "PROFILE_INVALID"
    exit_code = EXIT_INPUT


# [클래스 설명]
# - 역할: 클록 게이팅 삽입 실패(플립플롭 없음, 이미 게이팅됨, 이름 충돌 등).
class GatingError(CgError):
    code = "GATING_FAILED"


# [클래스 설명]
# - 역할: 자극 파일/자극 생성 인자 오류.
class StimulusError(CgError):
    code = "STIMULUS_INVALID"
    exit_code = EXIT_INPUT


# [클래스 설명]
# - 역할: 시뮬레이션 실행 오류(이벤트 상한 초과, 모르는 넷).
class SimulationError(CgError):
    code = "SIMULATION_FAILED"


# [클래스 설명]
# - 역할: 타이밍 특성화 실패(벤치 배선, 경계 없음, 비단조).
class CharacterizationError(CgError):
    code = "CHARACTERIZATION_FAILED"


# [클래스 설명]
# - 역할: 전력 추정/비교 실패.
class PowerError(CgError):
    code = "POWER_FAILED"


# [클래스 설명]
# - 역할: 게이팅 넷리스트 출력이 비게이팅과 달라진 경우.
# - 핵심 동작: 첫 불일치 사이클과 넷별 (비게이팅, 게이팅) 값 차이를 함께 싣는다.
class EquivalenceError(CgError):
    code = "EQUIVALENCE_MISMATCH"

    # [함수 설명]
    # - 목적: 불일치 사이클과 diff를 속성으로 보관한다.
    def __init__(self, message: str, *, cycle: int, diff: dict[str, tuple[str, str]]) -> None:
        super().__init__(message)
        self.cycle = cycle
        self.diff = diff


# [클래스 설명]
# - 역할: 설정 값/설정 파일 형식 오류. 사용법 오류로 취급한다.
class ConfigError(CgError):
    code = "CONFIG_INVALID"
    exit_code = EXIT_USAGE


# [클래스 설명]
# - 역할: 입력 파일을 읽지 못한 경우(경로 누락, 권한).
class InputFileError(CgError):
    code = "INPUT_IO"
    exit_code = EXIT_INPUT
