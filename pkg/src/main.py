import time

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import ORJSONResponse

from src.config import (
    ALLOW_HEADERS,
    ALLOW_METHODS,
    EXPOSE_HEADERS,
    ORIGINS,
    PROJECT_NAME,
    SWAGGER_PARAMETERS,
    API_PREFIX,
    VERSION,
)
from src.utils import lifespan
from src.bounds.routers import bounds_router
from src.montecarlo.routers import sweep_router


app = FastAPI(
    swagger_ui_parameters=SWAGGER_PARAMETERS,
    title=PROJECT_NAME,
    version=VERSION,
    lifespan=lifespan,
    default_response_class=ORJSONResponse,
)

api_routers = [
    bounds_router,
    sweep_router,
]

[app.include_router(router, prefix=API_PREFIX) for router in api_routers]

app.add_middleware(
    CORSMiddleware,
    allow_origins=ORIGINS,
    allow_credentials=True,
    allow_methods=ALLOW_METHODS,
    allow_headers=ALLOW_HEADERS,
    expose_headers=EXPOSE_HEADERS,
)


@app.get(f"{API_PREFIX}/health", tags=["Health"])
async def health():
    return {"status": "ok", "version": VERSION}


@app.middleware("http")
async def add_process_time_header(request: Request, call_next):
    start_time = time.time()
    response = await call_next(request)
    process_time = (time.time() - start_time) * 1000
    response.headers["X-Process-Time"] = f"{round(process_time)} ms"
    return response
