# [파일 설명]
# - 목적: 셀 지연에 균등 분포 변동을 주고 공칭 실행과 사이클 출력이 같은지 확인한다(Monte Carlo).
# - 입력/출력: Netlist, LibraryProfile, Stimulus, perturbation, trials, seed -> VariationResult
# - 결정론: 시행 i의 난수는 numpy default_rng(seed + i)에서만 나온다.
# - 주의 사항: 모든 실행은 타이밍 체크를 켜고 FF를 0으로 초기화한다.
# - 연관 모듈: event_sim(simulate/check_equivalence), techlib(scale_delays)
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from app.services.errors import CharacterizationError
from app.services.event_sim import SimOptions, check_equivalence, simulate
from app.services.logic import L0
from app.services.netlist_ir import Netlist
from app.services.stimulus import Stimulus
from app.services.techlib import LibraryProfile, scale_delays

logger = logging.getLogger(__name__)

MAX_PERTURBATION = 0.5
# 공칭 동작 온도(문서용)
NOMINAL_TEMPERATURE_C = 30.0


# [클래스 설명]
# - 역할: Monte Carlo 변동 검사 결과(시행 수, 실패 수, 실패한 시행 번호).
@dataclass(frozen=True)
class VariationResult:
    trials: int
    perturbation: float
    failures: int
    seed: int
    failing_trials: tuple[int, ...] = ()
    temperature_c: float = NOMINAL_TEMPERATURE_C

    # [함수 설명]
    # - 목적: 실패한 시행이 없으면 True.
    @property
    def stable(self) -> bool:
        return self.failures == 0


# [함수 설명]
# - 목적: 인스턴스 -> (상승, 하강) 배율. U[1-perturbation, 1+perturbation]에서 뽑는다.
# - 결정론: 같은 seed는 같은 배율을 만든다.
def trial_factors(n: Netlist, perturbation: float, seed: int) -> dict[str, tuple[float, float]]:
    rng = np.random.default_rng(seed)
    draws = rng.uniform(1.0 - perturbation, 1.0 + perturbation, size=(len(n.instances), 2))
    return {inst.name: (float(rise), float(fall)) for inst, (rise, fall) in zip(n.instances, draws, strict=True)}


# [함수 설명]
# - 목적: 공정 변동 안정성 검사.
# - 핵심 동작: 시행마다 모든 인스턴스의 t_rise/t_fall을 독립적으로 스케일하고,
#   클록 샘플 시점의 출력이 공칭 실행과 다르면 실패로 센다.
# - 에러 처리: perturbation이 [0, 0.5] 밖이거나 trials < 1이면 CharacterizationError.
def run_variation(
    n: Netlist,
    p: LibraryProfile,
    s: Stimulus,
    perturbation: float,
    trials: int,
    seed: int,
) -> VariationResult:
    if not 0.0 <= perturbation <= MAX_PERTURBATION:
        raise CharacterizationError(
            f"perturbation must be in [0, {MAX_PERTURBATION}], got {perturbation}", code="BAD_PERTURBATION"
        )
    if trials < 1:
        raise CharacterizationError(f"trials must be >= 1, got {trials}", code="BAD_TRIALS")

    outputs = list(n.outputs)
    sample_times = s.sample_times()
    nominal = simulate(n, p, s, SimOptions(timing_checks=True, init_ffs=L0))

    failing: list[int] = []
    for trial in range(trials):
        overrides = scale_delays(n, p, trial_factors(n, perturbation, seed + trial))
        trace = simulate(n, p, s, SimOptions(timing_checks=True, init_ffs=L0, cell_overrides=overrides))
        divergence = check_equivalence(nominal, trace, outputs, sample_times)
        if divergence is not None:
            failing.append(trial)
            logger.debug("run_variation: trial=%s diverged at cycle=%s diff=%s", trial, divergence.cycle, divergence.diff)

    result = VariationResult(
        trials=trials,
        perturbation=perturbation,
        failures=len(failing),
        seed=seed,
        failing_trials=tuple(failing),
    )
    logger.info(
        "run_variation: netlist=%s perturbation=%s trials=%s seed=%s failures=%s",
        n.name,
        perturbation,
        trials,
        seed,
        result.failures,
    )
    return result
