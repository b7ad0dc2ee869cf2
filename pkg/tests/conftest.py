# [파일 설명]
# - 목적: 테스트 공통 설정과 픽스처를 제공한다.
# - 제공 기능: 저장소 루트를 sys.path에 추가하고, 번들 프로파일/레지스터 데모/무작위 넷리스트 픽스처를 만든다.
# - 연관 모듈: app.services.techlib, app.services.netlist_ir, app.services.gating
from __future__ import annotations

import sys
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from app.services.gating import insert_clock_gating  # noqa: E402
from app.services.netlist_ir import Instance, Netlist, build_register_demo, make_netlist  # noqa: E402
from app.services.techlib import LibraryProfile, load_profile  # noqa: E402

# 무작위 넷리스트는 모든 셀 종류를 최소 한 번씩 포함한다
CELL_TYPES = ("INV", "CKBUF", "AND2", "NAND2", "XOR2", "LECTOR_AND2", "LECTOR_INV", "DFF_CONV")


# [함수 설명]
# - 목적: 세션 공용 paper-match 프로파일.
@pytest.fixture(scope="session")
def profile() -> LibraryProfile:
    return load_profile("paper-match")


# [함수 설명]
# - 목적: 2비트 레지스터 데모 넷리스트.
@pytest.fixture
def register2() -> Netlist:
    return build_register_demo(2)


# [함수 설명]
# - 목적: register2에 FF별 게이팅을 삽입한 넷리스트.
@pytest.fixture
def gated2(register2: Netlist, profile: LibraryProfile) -> Netlist:
    gated, _report = insert_clock_gating(register2, profile)
    return gated


# [함수 설명]
# - 목적: 후보 넷 중 하나를 rng로 고른다.
def _pick(rng: np.random.Generator, available: list[str]) -> str:
    return available[int(rng.integers(0, len(available)))]


# [함수 설명]
# - 목적: 유효한 비순환 무작위 넷리스트를 만든다.
# - 입력: index(모듈 이름 corpus<index>), rng
# - 출력: 입력 clk/i0/i1/i2, 인스턴스 u<k>가 넷 n<k>를 구동, 마지막 두 넷이 출력.
#   각 셀은 앞선 넷만 읽으므로 조합 루프가 없다.
def build_random_netlist(index: int, rng: np.random.Generator) -> Netlist:
    inputs = ["clk", "i0", "i1", "i2"]
    available = inputs[1:]
    kinds = list(CELL_TYPES) + [str(kind) for kind in rng.choice(CELL_TYPES, size=int(rng.integers(0, 8)))]
    rng.shuffle(kinds)
    instances: list[Instance] = []
    wires: list[str] = []
    for k, kind in enumerate(kinds):
        out = f"n{k}"
        if kind == "DFF_CONV":
            pins = {"D": _pick(rng, available), "CLK": "clk", "Q": out}
        elif kind in ("INV", "CKBUF", "LECTOR_INV"):
            pins = {"A": _pick(rng, available), "Y": out}
        else:
            pins = {"A": _pick(rng, available), "B": _pick(rng, available), "Y": out}
        instances.append(Instance(f"u{k}", kind, pins))
        wires.append(out)
        available.append(out)
    outputs = wires[-2:]
    return make_netlist(f"corpus{index}", inputs, outputs, instances, wires=wires[:-2])


# [함수 설명]
# - 목적: 무작위 넷리스트 생성기를 픽스처로 노출한다.
@pytest.fixture(scope="session")
def random_netlist() -> Callable[[int, np.random.Generator], Netlist]:
    return build_random_netlist
