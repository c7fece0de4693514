"""Room rearrangement simulator.

The heavy lifting lives in the compiled ``_core`` module. ``Env`` wraps an
in-process protocol session so Python code speaks the same wire format as
out-of-process agents.
"""

import json

from ._core import (
    Dataset,
    DatasetError,
    SchemaError,
    Session,
    action_names,
    box_iou,
    catalog_digest,
    csv_summary,
    run,
)

__all__ = [
    "Dataset",
    "DatasetError",
    "Env",
    "ProtocolError",
    "SchemaError",
    "Session",
    "action_names",
    "box_iou",
    "catalog_digest",
    "csv_summary",
    "run",
]


class ProtocolError(RuntimeError):
    def __init__(self, code, message):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class Env:
    """reset/step/close over a protocol session."""

    def __init__(self, dataset, mode="two-phase", allow_expert=False):
        self._session = Session(dataset, mode=mode, allow_expert=allow_expert)

    def _call(self, **request):
        reply = json.loads(self._session.handle(json.dumps(request)))
        if not reply["ok"]:
            raise ProtocolError(reply["error"], reply["message"])
        return reply

    def reset(self, episode, mode=None):
        request = {"cmd": "reset", "episode": episode}
        if mode is not None:
            request["mode"] = mode
        return self._call(**request)["observation"]

    def step(self, action, arg=None):
        request = {"cmd": "step", "action": action}
        if arg is not None:
            request["arg"] = arg
        reply = self._call(**request)
        return reply["observation"], reply["reward"], reply["done"], reply

    def expert_action(self):
        return self._call(cmd="expert_action")["action"]

    def close(self):
        self._call(cmd="close")
