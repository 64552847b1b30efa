# errors.py
"""
Error hierarchy for the intent IDS toolkit.

Every error carries a stable ``code`` (its class name) and a ``context`` dict
so the CLI can render it as JSON.
"""

from typing import Any, Dict, Optional


class IntentSecError(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, message: str = "", **context: Any):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.context: Dict[str, Any] = {k: v for k, v in context.items() if v is not None}

    @property
    def code(self) -> str:
        return self.__class__.__name__

    def to_dict(self) -> dict:
        return {
            "error": self.code,
            "message": self.message,
            "context": self.context,
        }

    def __str__(self) -> str:
        if not self.context:
            return self.message
        where = ", ".join(f"{k}={v}" for k, v in sorted(self.context.items()))
        return f"{self.message} ({where})"


class ConfigError(IntentSecError):
    """Invalid configuration or plan file."""


# ============================================
# manifest ingest
# ============================================

class MalformedXml(IntentSecError):
    pass


class MissingManifestRoot(IntentSecError):
    pass


class EmptyName(IntentSecError):
    pass


class LabelFileMissing(IntentSecError):
    pass


class UnknownLabelValue(IntentSecError):
    pass


class ManifestFileMissing(IntentSecError):
    def __init__(self, app_id: str, path: Optional[str] = None):
        super().__init__(f"Manifest file missing for app_id '{app_id}'", app_id=app_id, path=path)
        self.app_id = app_id


class DuplicateAppId(IntentSecError):
    pass


# ============================================
# features / stats
# ============================================

class EmptyCorpus(IntentSecError):
    pass


class ClassTooSmall(IntentSecError):
    pass


class MissingClass(IntentSecError):
    pass


class BothZero(IntentSecError):
    pass


# ============================================
# neural core
# ============================================

class ShapeMismatch(IntentSecError):
    pass


class NonFiniteGradient(IntentSecError):
    pass


class ConstraintViolation(IntentSecError):
    pass


class EmptyHiddenList(IntentSecError):
    pass


# ============================================
# evaluation / io
# ============================================

class SingleClass(IntentSecError):
    pass


class IoFailure(IntentSecError):
    pass
