# [파일 설명]
# - 목적: 같은 요청을 두 번 보내면 /cg 엔드포인트가 같은 응답을 주는지 확인한다.
# - 입력/출력: 레지스터 데모 넷리스트 텍스트와 고정 seed를 사용한다.
# - 연관 모듈: app.main/app.api.cg 및 서비스 레이어
from fastapi.testclient import TestClient

from app.main import app
from app.services.netlist_ir import build_register_demo, write_netlist


# [함수 설명]
# - 목적: gate, simulate, power/compare 응답이 요청마다 동일한지 검증한다.
# - 결정론: 무작위 활동 자극은 seed로만 정해진다.
def test_determinism_smoke_endpoints() -> None:
    client = TestClient(app)
    netlist = write_netlist(build_register_demo(3))

    gate_payload = {"netlist": netlist, "mode": "per-ff"}
    first = client.post("/cg/gate", json=gate_payload)
    second = client.post("/cg/gate", json=gate_payload)

    assert first.status_code == 200
    assert second.status_code == 200
    assert first.json() == second.json()

    stimulus = "horizon 4000\nclock clk 800\n0 D1 0\n0 D2 1\n0 D3 0\n1000 D1 1\n2600 D3 1\n"
    sim_payload = {"netlist": first.json()["netlist"], "stimulus": stimulus, "timing_checks": True, "init_ffs": "0"}
    first = client.post("/cg/simulate", json=sim_payload)
    second = client.post("/cg/simulate", json=sim_payload)

    assert first.status_code == 200
    assert first.json() == second.json()
    assert first.json()["violations"] == []

    power_payload = {"netlist": netlist, "alpha": 0.3, "cycles": 300, "seed": 12}
    first = client.post("/cg/power/compare", json=power_payload)
    second = client.post("/cg/power/compare", json=power_payload)

    assert first.status_code == 200
    assert first.json() == second.json()
