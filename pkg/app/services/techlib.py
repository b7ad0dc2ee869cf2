# [파일 설명]
# - 목적: 셀 라이브러리(지연/에너지/누설/트랜지스터 수)와 LECTOR 감소 계수를 관리한다.
# - 제공 기능: load_profile/parse_profile, transistor_total, effective_leakage, derive_profile.
# - 입력/출력: 라인 기반 프로파일 텍스트 -> 불변 LibraryProfile.
# - 주의 사항: LECTOR 셀 값은 평범한 대응 셀 x 계수와 1e-9 상대 오차 이내로 일치해야 한다.
# - 연관 모듈: netlist_ir(셀 인터페이스), event_sim(지연), power_model(에너지)
from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from pathlib import Path

from app.services.errors import ProfileError
from app.services.netlist_ir import CELL_INTERFACES, Netlist
from app.services.text_digest import summarize_text

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parents[1] / "data"
BUNDLED_PROFILES = {"paper-match": DATA_DIR / "paper_match.profile"}

REQUIRED_FUNCTIONS = (
    "INV",
    "AND2",
    "NAND2",
    "XOR2",
    "DFF_CONV",
    "LECTOR_AND2",
    "LECTOR_INV",
)
LECTOR_COUNTERPARTS = {"LECTOR_AND2": "AND2", "LECTOR_INV": "INV"}
RELATIVE_TOLERANCE = 1e-9

_REQUIRED_CELL_KEYS = ("t_rise", "t_fall", "e_toggle", "e_contention", "p_leak", "transistors")
_OPTIONAL_CELL_KEYS = ("e_clock", "t_setup", "t_hold")


# [클래스 설명]
# - 역할: 셀 한 종류의 전기적 특성. 지연(ps), 에너지(fJ), 누설(nW), 트랜지스터 수.
# - 제약/주의: e_clock/t_setup/t_hold는 순차 셀과 게이팅 셀에서만 의미가 있다.
@dataclass(frozen=True)
class CellSpec:
    name: str
    function: str
    t_rise: float
    t_fall: float
    e_toggle: float
    e_contention: float
    p_leak: float
    transistors: int
    # 순차 셀의 CLK 핀 0/1 전이당 내부 클록 에너지(fJ)
    e_clock: float = 0.0
    t_setup: float = 0.0
    t_hold: float = 0.0


# [클래스 설명]
# - 역할: 셀 이름 -> CellSpec 테이블과 LECTOR 감소 계수를 묶은 불변 라이브러리.
# - 사용 위치: 시뮬레이터 지연, 전력 모델 에너지, 게이팅 셀 선택, 넷리스트 셀 타입 해석.
# - 제약/주의: 생성 경로(parse_profile, derive_profile)가 check_profile로 불변식을 보장한다.
@dataclass(frozen=True)
class LibraryProfile:
    name: str
    cells: dict[str, CellSpec] = field(hash=False)
    lector_leak_factor: float = 0.2
    lector_contention_factor: float = 0.1
    lector_delay_penalty: float = 1.15
    v_dd: float = 1.1
    notes: str = ""

    # [함수 설명]
    # - 목적: 셀 이름으로 CellSpec을 찾는다.
    # - 에러 처리: 없으면 ProfileError(UNKNOWN_CELL).
    def cell(self, name: str) -> CellSpec:
        try:
            return self.cells[name]
        except KeyError:
            raise ProfileError(
                f"cell type '{name}' not in profile '{self.name}'", code="UNKNOWN_CELL"
            ) from None

    # [함수 설명]
    # - 목적: 셀 이름 -> 기능 태그 맵. netlist_ir가 셀 타입을 해석할 때 쓰는 형태다.
    @property
    def library(self) -> dict[str, str]:
        return {name: spec.function for name, spec in self.cells.items()}

    # [함수 설명]
    # - 목적: LECTOR 셀에 대응하는 평범한 셀(LECTOR_AND2 -> AND2, LECTOR_INV -> INV).
    # - 출력: 대응 셀이 없거나 LECTOR 셀이 아니면 None. 기능 이름과 같은 셀 이름을 먼저 고른다.
    def plain_counterpart(self, lector: CellSpec) -> CellSpec | None:
        function = LECTOR_COUNTERPARTS.get(lector.function)
        if function is None:
            return None
        if function in self.cells and self.cells[function].function == function:
            return self.cells[function]
        for spec in self.cells.values():
            if spec.function == function:
                return spec
        return None


# [함수 설명]
# - 목적: 프로파일 파일을 읽는다. 'paper-match' 같은 번들 이름도 받는다.
# - 에러 처리: 읽기 실패는 ProfileError(PROFILE_IO).
def load_profile(path: str | Path) -> LibraryProfile:
    source = BUNDLED_PROFILES.get(str(path), Path(path))
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProfileError(f"cannot read profile '{path}': {exc.strerror}", code="PROFILE_IO") from exc
    return parse_profile(text)


# [함수 설명]
# - 목적: 프로파일 텍스트를 파싱하고 CellSpec/프로파일 불변식을 모두 검증한다.
# - 에러 처리: 문법 오류, 필수 기능 태그 누락, 불변식 위반 시 ProfileError.
def parse_profile(text: str) -> LibraryProfile:
    summary = summarize_text(text)
    logger.info("parse_profile: text_len=%s text_hash=%s", summary["len"], summary["sha256_8"])

    name: str | None = None
    params: dict[str, float] = {}
    cells: dict[str, CellSpec] = {}
    notes: list[str] = []
    ended = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        keyword = tokens[0]
        if ended:
            raise ProfileError(f"line {line_no}: statement after endprofile", code="PROFILE_SYNTAX")
        if name is None:
            if keyword != "profile" or len(tokens) != 2:
                raise ProfileError(f"line {line_no}: expected 'profile <name>'", code="PROFILE_SYNTAX")
            name = tokens[1]
        elif keyword == "param":
            if len(tokens) != 3:
                raise ProfileError(f"line {line_no}: expected 'param <key> <float>'", code="PROFILE_SYNTAX")
            params[tokens[1]] = _number(tokens[2], line_no)
        elif keyword == "note":
            notes.append(" ".join(tokens[1:]))
        elif keyword == "cell":
            spec = _parse_cell_line(tokens, line_no)
            if spec.name in cells:
                raise ProfileError(f"line {line_no}: cell '{spec.name}' defined twice", code="PROFILE_SYNTAX")
            cells[spec.name] = spec
        elif keyword == "endprofile":
            ended = True
        else:
            raise ProfileError(f"line {line_no}: unknown statement '{keyword}'", code="PROFILE_SYNTAX")

    if name is None or not ended:
        raise ProfileError("profile must start with 'profile <name>' and end with 'endprofile'", code="PROFILE_SYNTAX")

    unknown = sorted(set(params) - {"lector_leak_factor", "lector_contention_factor", "lector_delay_penalty", "v_dd"})
    if unknown:
        raise ProfileError(f"unknown profile parameter(s): {', '.join(unknown)}", code="PROFILE_SYNTAX")

    profile = LibraryProfile(
        name=name,
        cells=cells,
        lector_leak_factor=params.get("lector_leak_factor", 0.2),
        lector_contention_factor=params.get("lector_contention_factor", 0.1),
        lector_delay_penalty=params.get("lector_delay_penalty", 1.15),
        v_dd=params.get("v_dd", 1.1),
        notes="; ".join(notes),
    )
    check_profile(profile)
    logger.info("parse_profile: name=%s cells=%s", profile.name, len(cells))
    return profile


# [함수 설명]
# - 목적: 토큰을 float으로. 실패하면 줄 번호가 붙은 PROFILE_SYNTAX.
def _number(token: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ProfileError(f"line {line_no}: '{token}' is not a number", code="PROFILE_SYNTAX") from None


# [함수 설명]
# - 목적: `cell <NAME> <FUNCTION> key=value ...` 한 줄을 CellSpec으로 만든다.
# - 에러 처리: 모르는 기능 태그/속성, 필수 속성 누락, 정수가 아닌 트랜지스터 수는 PROFILE_SYNTAX.
def _parse_cell_line(tokens: list[str], line_no: int) -> CellSpec:
    if len(tokens) < 3:
        raise ProfileError(f"line {line_no}: expected 'cell <NAME> <FUNCTION> key=value ...'", code="PROFILE_SYNTAX")
    cell_name, function = tokens[1], tokens[2]
    if function not in CELL_INTERFACES:
        raise ProfileError(f"line {line_no}: unknown function tag '{function}'", code="PROFILE_SYNTAX")
    values: dict[str, float] = {}
    for token in tokens[3:]:
        key, sep, value = token.partition("=")
        if not sep or key not in (*_REQUIRED_CELL_KEYS, *_OPTIONAL_CELL_KEYS):
            raise ProfileError(f"line {line_no}: bad cell attribute '{token}'", code="PROFILE_SYNTAX")
        values[key] = _number(value, line_no)
    missing = [key for key in _REQUIRED_CELL_KEYS if key not in values]
    if missing:
        raise ProfileError(f"line {line_no}: cell '{cell_name}' missing {', '.join(missing)}", code="PROFILE_SYNTAX")
    transistors = values["transistors"]
    if transistors != int(transistors):
        raise ProfileError(f"line {line_no}: transistors must be an integer", code="PROFILE_SYNTAX")
    return CellSpec(
        name=cell_name,
        function=function,
        t_rise=values["t_rise"],
        t_fall=values["t_fall"],
        e_toggle=values["e_toggle"],
        e_contention=values["e_contention"],
        p_leak=values["p_leak"],
        transistors=int(transistors),
        e_clock=values.get("e_clock", 0.0),
        t_setup=values.get("t_setup", 0.0),
        t_hold=values.get("t_hold", 0.0),
    )


# [함수 설명]
# - 목적: 셀 단위 범위 검사와 LECTOR 계수 관계를 검증한다.
# - 에러 처리: 첫 위반에서 ProfileError(code=PROFILE_INVARIANT)를 던진다.
def check_profile(profile: LibraryProfile) -> None:
    if not 0 < profile.lector_leak_factor <= 1:
        raise _violation("lector_leak_factor must be in (0, 1]")
    if not 0 < profile.lector_contention_factor <= 1:
        raise _violation("lector_contention_factor must be in (0, 1]")
    if profile.lector_delay_penalty < 1:
        raise _violation("lector_delay_penalty must be >= 1")

    present = {spec.function for spec in profile.cells.values()}
    missing = [function for function in REQUIRED_FUNCTIONS if function not in present]
    if missing:
        raise ProfileError(f"profile '{profile.name}' missing required cell(s): {', '.join(missing)}", code="PROFILE_MISSING_CELL")

    for spec in profile.cells.values():
        if spec.t_rise <= 0 or spec.t_fall <= 0:
            raise _violation(f"{spec.name}: delays must be > 0")
        if min(spec.e_toggle, spec.e_contention, spec.e_clock, spec.p_leak) < 0:
            raise _violation(f"{spec.name}: energies and leakage must be >= 0")
        if spec.t_setup < 0 or spec.t_hold < 0:
            raise _violation(f"{spec.name}: timing-check windows must be >= 0")
        if spec.transistors < 1:
            raise _violation(f"{spec.name}: transistors must be >= 1")

    for spec in profile.cells.values():
        plain = profile.plain_counterpart(spec)
        if plain is None:
            continue
        if spec.p_leak > plain.p_leak:
            raise _violation(f"{spec.name} leaks more than {plain.name} ({spec.p_leak} > {plain.p_leak} nW)")
        if spec.e_contention > plain.e_contention:
            raise _violation(f"{spec.name} contention exceeds {plain.name}")
        pairs = (
            ("p_leak", spec.p_leak, profile.lector_leak_factor * plain.p_leak),
            ("e_contention", spec.e_contention, profile.lector_contention_factor * plain.e_contention),
            ("t_rise", spec.t_rise, profile.lector_delay_penalty * plain.t_rise),
            ("t_fall", spec.t_fall, profile.lector_delay_penalty * plain.t_fall),
        )
        for attribute, actual, expected in pairs:
            if not math.isclose(actual, expected, rel_tol=RELATIVE_TOLERANCE, abs_tol=1e-12):
                raise _violation(f"{spec.name}.{attribute}={actual} but factor relation requires {expected}")


# [함수 설명]
# - 목적: 불변식 위반 ProfileError(PROFILE_INVARIANT)를 만든다.
def _violation(message: str) -> ProfileError:
    return ProfileError(message, code="PROFILE_INVARIANT")


# [함수 설명]
# - 목적: LECTOR 계수만 바꾼 프로파일 사본. LECTOR 셀 값은 대응 셀 x 새 계수로 다시 계산한다.
# - 에러 처리: 새 계수가 범위를 벗어나면 check_profile의 ProfileError.
def derive_profile(
    profile: LibraryProfile,
    *,
    lector_leak_factor: float | None = None,
    lector_contention_factor: float | None = None,
    lector_delay_penalty: float | None = None,
) -> LibraryProfile:
    derived = replace(
        profile,
        lector_leak_factor=profile.lector_leak_factor if lector_leak_factor is None else lector_leak_factor,
        lector_contention_factor=(
            profile.lector_contention_factor if lector_contention_factor is None else lector_contention_factor
        ),
        lector_delay_penalty=profile.lector_delay_penalty if lector_delay_penalty is None else lector_delay_penalty,
    )
    cells = dict(profile.cells)
    for name, spec in profile.cells.items():
        plain = profile.plain_counterpart(spec)
        if plain is None:
            continue
        cells[name] = replace(
            spec,
            p_leak=derived.lector_leak_factor * plain.p_leak,
            e_contention=derived.lector_contention_factor * plain.e_contention,
            t_rise=round(derived.lector_delay_penalty * plain.t_rise, 9),
            t_fall=round(derived.lector_delay_penalty * plain.t_fall, 9),
        )
    derived = replace(derived, cells=cells)
    check_profile(derived)
    return derived


# [함수 설명]
# - 목적: 모든 셀의 에너지/누설에 k를 곱한 사본(절감률 척도 불변성 확인용).
def scale_energies(profile: LibraryProfile, k: float) -> LibraryProfile:
    cells = {
        name: replace(
            spec,
            e_toggle=spec.e_toggle * k,
            e_contention=spec.e_contention * k,
            e_clock=spec.e_clock * k,
            p_leak=spec.p_leak * k,
        )
        for name, spec in profile.cells.items()
    }
    return replace(profile, cells=cells)


# [함수 설명]
# - 목적: 인스턴스별 (상승, 하강) 지연 배율을 적용한 CellSpec 맵. 공정 변동 시행에서 쓴다.
# - 주의 사항: 계수 관계는 다시 검사하지 않는다(변동 시행은 의도적으로 관계를 깬다).
def scale_delays(
    n: Netlist, p: LibraryProfile, factors: Mapping[str, tuple[float, float]]
) -> dict[str, CellSpec]:
    scaled: dict[str, CellSpec] = {}
    for inst in n.instances:
        spec = p.cell(inst.cell_type)
        rise, fall = factors.get(inst.name, (1.0, 1.0))
        scaled[inst.name] = replace(spec, t_rise=spec.t_rise * rise, t_fall=spec.t_fall * fall)
    return scaled


# [함수 설명]
# - 목적: 넷리스트의 인스턴스별 트랜지스터 수를 합산한다.
# - 에러 처리: 프로파일에 없는 셀 타입이면 ProfileError(UNKNOWN_CELL).
def transistor_total(n: Netlist, p: LibraryProfile) -> int:
    total = sum(p.cell(inst.cell_type).transistors for inst in n.instances)
    logger.info("transistor_total: netlist=%s profile=%s total=%s", n.name, p.name, total)
    return total


# [함수 설명]
# - 목적: 정적 전력(nW) 합. LECTOR 셀은 이미 감소된 누설 값을 가진다.
def effective_leakage(n: Netlist, p: LibraryProfile) -> float:
    return sum(p.cell(inst.cell_type).p_leak for inst in n.instances)
