# [파일 설명]
# - 목적: 넷리스트/스티뮬러스 원문 대신 길이와 해시 요약만 로그에 남기도록 돕는다.
# - 제공 기능: summarize_text, digest_bytes.
# - 입력/출력: 원문 텍스트를 받아 요약 dict 또는 hex 다이제스트를 반환한다.
# - 연관 모듈: netlist_ir, techlib, stimulus, reports
from __future__ import annotations

import hashlib


# [함수 설명]
# - 목적: 로그용 텍스트 요약(길이, sha256 앞 8자리). 원문은 남기지 않는다.
def summarize_text(text: str) -> dict[str, int | str]:
    text_hash = hashlib.sha256(text.encode("utf-8")).hexdigest()[:8]
    return {"len": len(text), "sha256_8": text_hash}


# [함수 설명]
# - 목적: 바이트열 sha256 16진 다이제스트의 앞 length자리.
def digest_bytes(payload: bytes, length: int = 12) -> str:
    return hashlib.sha256(payload).hexdigest()[:length]
