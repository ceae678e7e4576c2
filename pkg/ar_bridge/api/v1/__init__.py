from fastapi import APIRouter

from ar_bridge.api.v1 import oracle, selection

api_router = APIRouter()
api_router.include_router(selection.router, prefix="/selection", tags=["selection"])
api_router.include_router(oracle.router, prefix="/oracle", tags=["oracle"])
