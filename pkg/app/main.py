from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from app import __version__
from app.routers import balance, bounds, density, experiments, graphs, predictions
from app.utils.config import settings
import logging
import uvicorn
import os

logging.basicConfig(level=settings.LOG_LEVEL)

app = FastAPI(
    title=settings.APP_NAME,
    description="Balanced loads, maximum subgraph density and their random-graph limits",
    version=__version__,
    docs_url="/docs",
    redoc_url="/redoc",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

@app.get("/")
async def root():
    return {"message": f"{settings.APP_NAME} is running"}

@app.get("/health")
async def health_check():
    return {"status": "ok"}

app.include_router(graphs.router, prefix=f"{settings.API_PREFIX}/graphs", tags=["Graphs"])
app.include_router(balance.router, prefix=f"{settings.API_PREFIX}/balance", tags=["Balance"])
app.include_router(density.router, prefix=f"{settings.API_PREFIX}/density", tags=["Density"])
app.include_router(predictions.router, prefix=f"{settings.API_PREFIX}/predictions", tags=["Predictions"])
app.include_router(bounds.router, prefix=f"{settings.API_PREFIX}/bounds", tags=["Bounds"])
app.include_router(experiments.router, prefix=f"{settings.API_PREFIX}/experiments", tags=["Experiments"])

if __name__ == "__main__":
    port = int(os.getenv("PORT", 8000))
    uvicorn.run("app.main:app", host="0.0.0.0", port=port, reload=True)
