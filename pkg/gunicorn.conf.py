import os

bind = f"0.0.0.0:{os.environ.get('INHARMONICA_PORT', '8000')}"
# bound computations run in the threadpool of each worker
workers = int(os.environ.get("INHARMONICA_WORKERS", "2"))
worker_class = "uvicorn.workers.UvicornWorker"
capture_output = True
loglevel = os.environ.get("INHARMONICA_LOG_LEVEL", "info").lower()
