"""Construct a reasoner by kind."""

from typing import Optional

from src.models.reasoning_models import RuleReasonerConfig
from src.reasoning.base import Reasoner
from src.reasoning.privileged import PrivilegedReasoner
from src.reasoning.remote import RemoteReasoner
from src.reasoning.rule import RuleReasoner
from src.utils import settings
from src.utils.errors import ConfigError

REASONER_KINDS = ("rule", "privileged", "remote")


def make_reasoner(
    kind: str,
    rule_config: Optional[RuleReasonerConfig] = None,
    l_arm: float = 0.35,
    url: Optional[str] = None,
    timeout_ms: Optional[int] = None,
) -> Reasoner:
    if kind == "rule":
        return RuleReasoner(rule_config or RuleReasonerConfig(l_arm=l_arm))
    if kind == "privileged":
        return PrivilegedReasoner(l_arm=l_arm)
    if kind == "remote":
        url = url or settings.reasoner_url()
        if not url:
            raise ConfigError("Remote reasoner needs --reasoner-url or REASONER_URL")
        return RemoteReasoner(url, timeout_ms=timeout_ms or settings.reasoner_timeout_ms())
    raise ConfigError(f"Unknown reasoner kind '{kind}', expected one of {REASONER_KINDS}")
