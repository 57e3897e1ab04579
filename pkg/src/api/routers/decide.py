"""
Decision Router

Serves the /decide wire protocol with the rule-based reasoner, so the remote
reasoner client can be exercised end to end without a vision-language model.
"""

from typing import Union

import structlog
from fastapi import APIRouter, HTTPException

from src.models.reasoning_models import (
    AdjustResponse,
    CooperateResponse,
    DecideRequest,
    QueryKind,
    SelectResponse,
)
from src.reasoning.rule import RuleReasoner
from src.utils.errors import DomainError

logger = structlog.get_logger()

router = APIRouter(tags=["decide"])

reasoner = RuleReasoner()


@router.post("/decide")
def decide(request: DecideRequest) -> Union[AdjustResponse, SelectResponse, CooperateResponse]:
    """Answer one adjust, select or cooperate query."""
    logger.info(
        "Decision requested",
        query_kind=request.query_kind.value,
        masks=len(request.mask_summaries),
        has_images=request.images is not None,
    )
    if request.query_kind == QueryKind.ADJUST:
        return AdjustResponse(adjust_ids=reasoner.adjust_ids(request.mask_summaries))

    if request.query_kind == QueryKind.SELECT:
        if request.task is None:
            raise HTTPException(status_code=422, detail="select queries need a task")
        try:
            return SelectResponse(selected_id=reasoner.selected_id(request.mask_summaries, request.task))
        except DomainError as e:
            raise HTTPException(status_code=422, detail=str(e))

    if request.lift is None:
        raise HTTPException(status_code=422, detail="cooperate queries need a lift summary")
    answer = reasoner.cooperation(request.lift)
    return CooperateResponse(x_error=answer.x_error, x_dual=answer.x_dual)
