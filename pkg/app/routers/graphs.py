from fastapi import APIRouter, Depends, File, UploadFile
import logging
from app.routers.errors import to_http
from app.services.graph_service import GraphService
from app.schemas.graphs import GenerateGraphRequest, GraphSummary

router = APIRouter()
logger = logging.getLogger(__name__)

def get_graph_service():
    return GraphService()

@router.post("/generate", response_model=GraphSummary)
async def generate_graph(
    request: GenerateGraphRequest,
    service: GraphService = Depends(get_graph_service)
):
    """Sample a graph from a named model (pairing model, regular or Erdos-Renyi)"""
    try:
        result = await service.generate(
            model=request.model,
            n=request.n,
            m=request.m,
            seed=request.seed,
            keep_multi=request.keep_multi
        )
        return GraphSummary(**result)
    except Exception as e:
        raise to_http(e, "generate graph")

@router.post("/upload", response_model=GraphSummary)
async def upload_graph(
    file: UploadFile = File(...),
    service: GraphService = Depends(get_graph_service)
):
    """Parse an uploaded edge-list file"""
    try:
        content = await file.read()
        return GraphSummary(**await service.parse_upload(content))
    except Exception as e:
        raise to_http(e, f"parse {file.filename}")
