"""
Remote Reasoner Client

Talks to an external decision service over the /decide wire protocol:
- Synchronous httpx client with a configurable timeout
- Exponential backoff retry on transport errors and 5xx responses
- Strict pydantic validation of every response; no silent defaults
"""

import base64
import time
from typing import Any, List, Optional, Type, TypeVar

import httpx
import structlog
from pydantic import BaseModel, ValidationError

from src.models.reasoning_models import (
    AdjustResponse,
    CoopAnswer,
    CooperateResponse,
    DecideRequest,
    ImagePayload,
    QueryKind,
    SelectResponse,
    TaskSpec,
)
from src.perception.annotate import to_ppm
from src.reasoning.base import LiftView, Reasoner, SceneView
from src.utils.errors import ReasonerProtocolError, ReasonerUnavailableError

logger = structlog.get_logger()

ResponseT = TypeVar("ResponseT", bound=BaseModel)


def _b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


class RemoteReasoner(Reasoner):
    """Reasoner backed by an HTTP decision service."""

    name = "remote"

    def __init__(
        self,
        base_url: str,
        timeout_ms: int = 10_000,
        client: Optional[httpx.Client] = None,
        send_images: bool = True,
        max_retries: int = 3,
        base_delay: float = 0.5,
        max_delay: float = 8.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.send_images = send_images
        self.max_retries = max_retries
        self.base_delay = base_delay
        self.max_delay = max_delay
        self._owns_client = client is None
        self.client = client or httpx.Client(timeout=httpx.Timeout(timeout_ms / 1000.0))

    def close(self) -> None:
        if self._owns_client:
            self.client.close()

    def _post(self, request: DecideRequest, response_model: Type[ResponseT]) -> ResponseT:
        url = f"{self.base_url}/decide"
        payload = request.model_dump(mode="json", exclude_none=True)
        last_exception: Optional[Exception] = None

        for attempt in range(self.max_retries + 1):
            try:
                response = self.client.post(url, json=payload)
                response.raise_for_status()
            except httpx.HTTPStatusError as e:
                status_code = e.response.status_code
                logger.warning(
                    "Reasoner request failed",
                    url=url,
                    query_kind=request.query_kind.value,
                    attempt=attempt + 1,
                    status_code=status_code,
                )
                if 400 <= status_code < 500:
                    raise ReasonerProtocolError(
                        f"Decision service rejected the {request.query_kind.value} query ({status_code})"
                    ) from e
                last_exception = e
            except httpx.HTTPError as e:
                logger.warning(
                    "Reasoner request failed",
                    url=url,
                    query_kind=request.query_kind.value,
                    attempt=attempt + 1,
                    error=str(e),
                )
                last_exception = e
            else:
                return self._parse(response, response_model)

            if attempt < self.max_retries:
                time.sleep(min(self.base_delay * (2 ** attempt), self.max_delay))

        logger.error("All retries exhausted for reasoner request", url=url, attempts=self.max_retries + 1)
        raise ReasonerUnavailableError(f"Decision service at {url} unavailable") from last_exception

    @staticmethod
    def _parse(response: httpx.Response, response_model: Type[ResponseT]) -> ResponseT:
        try:
            body: Any = response.json()
        except ValueError as e:
            raise ReasonerProtocolError("Decision service returned a non-JSON body") from e
        try:
            return response_model.model_validate(body)
        except ValidationError as e:
            raise ReasonerProtocolError(f"Malformed {response_model.__name__}: {e}") from e

    def _scene_images(self, view: SceneView) -> Optional[ImagePayload]:
        if not self.send_images or view.annotated is None:
            return None
        border, fill = view.annotated
        return ImagePayload(border_ppm_b64=_b64(to_ppm(border.image)), fill_ppm_b64=_b64(to_ppm(fill.image)))

    def decide_adjust(self, view: SceneView) -> List[int]:
        request = DecideRequest(
            query_kind=QueryKind.ADJUST, mask_summaries=view.summaries, images=self._scene_images(view)
        )
        ids = self._post(request, AdjustResponse).adjust_ids
        known = {s.marker_id for s in view.summaries}
        if not set(ids) <= known:
            raise ReasonerProtocolError(f"adjust_ids {ids} reference unknown masks")
        return sorted(set(ids))

    def select_target(self, view: SceneView, task: TaskSpec) -> int:
        request = DecideRequest(
            query_kind=QueryKind.SELECT,
            task=task,
            mask_summaries=view.summaries,
            images=self._scene_images(view),
        )
        selected = self._post(request, SelectResponse).selected_id
        if selected not in {s.marker_id for s in view.summaries}:
            raise ReasonerProtocolError(f"selected_id {selected} is not a mask marker")
        return selected

    def decide_cooperation(self, view: LiftView) -> CoopAnswer:
        images = None
        if self.send_images:
            images = ImagePayload(post_lift_ppm_b64=_b64(to_ppm(view.post.color)))
        request = DecideRequest(
            query_kind=QueryKind.COOPERATE, mask_summaries=view.summaries, lift=view.lift, images=images
        )
        answer = self._post(request, CooperateResponse)
        return CoopAnswer(x_error=answer.x_error, x_dual=answer.x_dual)
