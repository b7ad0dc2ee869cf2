# [파일 설명]
# - 목적: 실행 설정(RunConfig)을 기본값 < 환경변수(CGFORGE_*) < 설정 파일 < CLI 플래그 순으로 조립한다.
# - 입력/출력: .env(python-dotenv), `key value` 설정 파일, 플래그 dict -> RunConfig
# - 결정론: config_digest는 output_dir를 뺀 정규 JSON의 sha256 앞 12자리다.
# - 연관 모듈: cli, services.reports(header_line)
from __future__ import annotations

import json
import logging
import os
from collections.abc import Mapping
from pathlib import Path
from typing import Any, Literal

from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.services.errors import ConfigError, InputFileError
from app.services.gating import GatingMode
from app.services.text_digest import digest_bytes

logger = logging.getLogger(__name__)

ENV_PREFIX = "CGFORGE_"


# [클래스 설명]
# - 역할: 한 번의 실행에 필요한 모든 설정값과 검증 규칙.
# - 사용 위치: cli 서브커맨드, config_digest(보고서 헤더).
# - 제약/주의: 불변(frozen)이며 알 수 없는 키는 거부한다.
class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    profile_path: str = "paper-match"
    netlist_path: str | None = None
    stimulus_path: str | None = None
    output_dir: str = "cgforge_out"
    seed: int = 0
    epsilon_ps: float = Field(default=1.0, gt=0)
    clock_period_ps: float = Field(default=800.0, gt=0)
    mode: GatingMode = GatingMode.PER_FF
    units: Literal["ns", "ps"] = "ns"
    alpha: float = Field(default=0.1, ge=0, le=1)
    cycles: int = Field(default=10_000, ge=1)
    trials: int = Field(default=100, ge=1)
    perturbation: float = Field(default=0.02, ge=0, le=0.5)
    width: int = Field(default=2, ge=1)


FIELDS = tuple(RunConfig.model_fields)


# [함수 설명]
# - 목적: 작업 디렉터리 기준 .env를 os.environ에 올린다. 이미 있는 환경변수는 덮어쓰지 않는다.
# - 주의 사항: 로깅 설정(CGFORGE_LOG_LEVEL)보다 먼저 호출해야 .env 값이 반영된다.
def load_environment(dotenv_path: str | Path | None = None) -> bool:
    path = dotenv_path if dotenv_path is not None else find_dotenv(usecwd=True)
    if not path:
        return False
    return load_dotenv(dotenv_path=path, override=False)


# [함수 설명]
# - 목적: CGFORGE_<FIELD> 환경변수에서 설정값을 모은다.
# - 입력: environ(테스트용 주입, None이면 .env를 읽은 뒤 os.environ), dotenv_path
# - 출력: {필드 이름: 문자열 값}
def env_overrides(environ: Mapping[str, str] | None = None, dotenv_path: str | Path | None = None) -> dict[str, str]:
    if environ is None:
        load_environment(dotenv_path)
        environ = os.environ
    values = {}
    for name in FIELDS:
        key = ENV_PREFIX + name.upper()
        if key in environ:
            values[name] = environ[key]
    return values


# [함수 설명]
# - 목적: `<key> <value>` 줄 형식 설정 파일을 파싱한다. `#` 뒤는 주석, 키의 `-`는 `_`로 읽는다.
# - 에러 처리: 알 수 없는 키나 값 없는 줄은 ConfigError(exit 2).
def parse_config_file(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition(" ")
        key = key.strip().replace("-", "_")
        if key not in FIELDS or not value.strip():
            raise ConfigError(f"config line {line_no}: expected '<key> <value>' with a known key, got '{raw.strip()}'")
        values[key] = value.strip()
    return values


# [함수 설명]
# - 목적: 설정 파일을 읽어 parse_config_file에 넘긴다.
# - 에러 처리: 읽기 실패는 InputFileError(exit 3).
def load_config_file(path: str | Path) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFileError(f"cannot read config file '{path}': {exc.strerror}") from exc
    return parse_config_file(text)


# [함수 설명]
# - 목적: 네 단계 우선순위로 RunConfig를 만든다.
# - 입력: flags(None 값은 미지정으로 취급), config_path, environ(테스트용 주입)
# - 에러 처리: 값 검증 실패는 ConfigError(exit 2).
def build_config(
    flags: Mapping[str, Any] | None = None,
    config_path: str | Path | None = None,
    environ: Mapping[str, str] | None = None,
) -> RunConfig:
    merged: dict[str, Any] = {}
    merged.update(env_overrides(environ))
    if config_path is not None:
        merged.update(load_config_file(config_path))
    merged.update({key: value for key, value in (flags or {}).items() if key in FIELDS and value is not None})
    try:
        config = RunConfig.model_validate(merged)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"invalid config value for {where}: {first['msg']}") from exc
    logger.info("build_config: keys=%s digest=%s", sorted(merged), config_digest(config))
    return config


# [함수 설명]
# - 목적: 출력 위치(output_dir)를 뺀 모든 설정의 짧은 다이제스트.
# - 결정론: 키 정렬 JSON이라 같은 설정이면 같은 값이다.
def config_digest(config: RunConfig) -> str:
    canonical = json.dumps(config.model_dump(mode="json", exclude={"output_dir"}), sort_keys=True, separators=(",", ":"))
    return digest_bytes(canonical.encode("utf-8"), length=12)
