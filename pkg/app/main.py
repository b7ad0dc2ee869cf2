# [파일 설명]
# - 목적: FastAPI 애플리케이션을 생성하고 라우터를 조립한다.
# - 제공 기능: /health 엔드포인트와 /cg 분석 라우터 등록, CgError -> 422 변환.
# - 입력/출력: HTTP 요청에 대해 상태 정보 또는 분석 결과를 반환한다.
# - 연관 모듈: app.api.cg 라우터와 연동된다.
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from app import __version__
from app.api.cg import router as cg_router
from app.services.errors import CgError

app = FastAPI(title="cgforge", version=__version__)


# [함수 설명]
# - 목적: 서비스 상태 확인을 위한 헬스 체크 응답을 제공한다.
# - 출력: status 필드를 포함한 간단한 상태 응답을 반환한다.
# - 결정론: 항상 동일한 상태 값을 반환하도록 유지한다.
@app.get("/health")
def health() -> dict[str, str]:
    return {"status": "ok"}


# [함수 설명]
# - 목적: 서비스 레이어 CgError를 422 JSON {"code", "message"}로 바꾼다.
@app.exception_handler(CgError)
def cg_error_handler(_request: Request, exc: CgError) -> JSONResponse:
    return JSONResponse(status_code=422, content=exc.to_dict())


app.include_router(cg_router, prefix="/cg")
