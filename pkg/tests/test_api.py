"""
API Tests for the Reference Decision Service

Tests for the /decide wire protocol, health and error handling.
"""

from unittest.mock import patch

import pytest
from fastapi.testclient import TestClient

from src import __version__
from src.api.main import app

client = TestClient(app)


def summary(marker_id, rgb, depth, overlaps=()):
    return {
        "marker_id": marker_id,
        "area": 16,
        "dominant_colors": [{"rgb": list(rgb), "share": 1.0}],
        "raggedness": 16.0,
        "mean_depth": depth,
        "bbox": [0, 0, 3, 3],
        "overlap_ids": list(overlaps),
    }


SUMMARIES = [
    summary(1, (200, 30, 40), 0.005, [2]),
    summary(2, (35, 70, 190), 0.010, [1]),
]


class TestHealthEndpoint:
    """Test health check endpoint."""

    def test_health_endpoint(self):
        """Test that health endpoint returns proper response."""
        response = client.get("/health")
        assert response.status_code == 200

        data = response.json()
        assert data["status"] == "healthy"
        assert data["service"] == "garment-decision-service"
        assert data["version"] == __version__
        assert "timestamp" in data


class TestRootEndpoint:
    """Test root endpoint."""

    def test_root_endpoint(self):
        """Test that root endpoint returns service information."""
        response = client.get("/")
        assert response.status_code == 200

        data = response.json()
        assert data["message"] == "Garment Retrieval Decision Service"
        assert data["endpoints"]["decide"] == "/decide"


class TestDecideEndpoint:
    """Test the three query kinds."""

    def test_adjust(self):
        """Test that a clean mask set needs no adjustment."""
        response = client.post("/decide", json={"query_kind": "adjust", "mask_summaries": SUMMARIES})
        assert response.status_code == 200
        assert response.json() == {"adjust_ids": []}

    def test_select_task_a(self):
        """Test that Task A picks the highest mask."""
        response = client.post(
            "/decide",
            json={"query_kind": "select", "task": {"kind": "A"}, "mask_summaries": SUMMARIES},
        )
        assert response.status_code == 200
        assert response.json() == {"selected_id": 2}

    def test_select_task_b(self):
        """Test that Task B clears the garment lying on the target."""
        response = client.post(
            "/decide",
            json={
                "query_kind": "select",
                "task": {"kind": "B", "target": {"color": "red"}},
                "mask_summaries": SUMMARIES,
            },
        )
        assert response.status_code == 200
        assert response.json() == {"selected_id": 2}

    def test_cooperate(self):
        """Test that a long bounding-box diagonal asks for the second arm."""
        lift = {
            "grasp_cell": [3, 3],
            "picked_area": 40,
            "lifted_area": 40,
            "selected_area": 40,
            "lifted_colors": [{"rgb": [200, 30, 40], "share": 1.0}],
            "hang_extent": 0.2,
            "bbox_extent": 0.4,
        }
        response = client.post(
            "/decide", json={"query_kind": "cooperate", "mask_summaries": SUMMARIES, "lift": lift}
        )
        assert response.status_code == 200
        assert response.json() == {"x_error": 0, "x_dual": 1}


class TestDecideValidation:
    """Test rejected queries."""

    @pytest.mark.parametrize(
        "body",
        [
            {"query_kind": "select", "mask_summaries": SUMMARIES},
            {"query_kind": "select", "task": {"kind": "A"}, "mask_summaries": []},
            {"query_kind": "cooperate", "mask_summaries": SUMMARIES},
            {"query_kind": "guess", "mask_summaries": SUMMARIES},
            {"query_kind": "select", "task": {"kind": "B"}, "mask_summaries": SUMMARIES},
        ],
    )
    def test_rejected(self, body):
        """Test that incomplete queries get a 422."""
        assert client.post("/decide", json=body).status_code == 422


class TestErrorHandling:
    """Test error handling."""

    @patch("src.api.routers.decide.reasoner")
    def test_unexpected_error(self, mock_reasoner):
        """Test that unexpected errors return a JSON 500."""
        mock_reasoner.adjust_ids.side_effect = RuntimeError("boom")
        local = TestClient(app, raise_server_exceptions=False)
        response = local.post("/decide", json={"query_kind": "adjust", "mask_summaries": SUMMARIES})
        assert response.status_code == 500
        assert response.json()["error"] == "Internal server error"
