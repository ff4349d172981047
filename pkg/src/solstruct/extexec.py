"""Client for an out-of-process program executor.

The executor is any command that reads one JSON request on stdin
({"source", "timeout_ms", "whitelist"}) and writes one JSON response on
stdout ({"status": "ok"|"error"|"timeout", ...}). A sandboxed runner
implementing this protocol lives in the pyexec/ package; this client only
speaks the wire format and converts responses back into traces.
"""

from __future__ import annotations

import json
import os
import shlex
import subprocess

from . import evalcore
from .errors import SolstructError

ENV_CMD = "SOLSTRUCT_PYEXEC_CMD"
DEFAULT_TIMEOUT_MS = 500


class ExternalExecError(SolstructError):
    def __init__(self, message: str, kind: str | None = None):
        super().__init__(message)
        self.kind = kind


class ExternalTimeout(ExternalExecError):
    pass


def default_command() -> list[str]:
    """The runner command, from the environment or the sibling checkout."""
    env = os.environ.get(ENV_CMD)
    if env:
        return shlex.split(env)
    here = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    main_js = os.path.join(here, "pyexec", "dist", "main.js")
    if os.path.exists(main_js):
        return ["node", main_js]
    raise ExternalExecError(
        f"no external runner: set {ENV_CMD} or build pyexec/ (dist/main.js not found)"
    )


def _parse_trace(payload: dict) -> evalcore.Trace:
    entries = []
    for i, e in enumerate(payload.get("entries", [])):
        value = e["value"]
        value = float(value) if e.get("kind") == "float" else int(value)
        entries.append(evalcore.TraceEntry(index=i, line=int(e["line"]), var=e["var"], value=value))
    res = payload["result"]
    result = float(res["value"]) if res.get("kind") == "float" else int(res["value"])
    return evalcore.Trace(entries=entries, result=result)


def run_external(
    source: str,
    timeout_ms: int = DEFAULT_TIMEOUT_MS,
    whitelist: list[str] | None = None,
    cmd: list[str] | None = None,
) -> evalcore.Trace:
    """Run a program in the external sandbox and return its trace.

    Raises ExternalTimeout when the runner reports a deadline overrun and
    ExternalExecError for any execution or protocol failure.
    """
    command = cmd or default_command()
    request = json.dumps(
        {
            "source": source,
            "timeout_ms": timeout_ms,
            "whitelist": whitelist if whitelist is not None else ["math"],
        }
    )
    # wall budget: the runner itself kills at timeout_ms and must exit well
    # inside timeout_ms + 1000; pad generously for process startup
    wall = (timeout_ms + 5000) / 1000.0
    try:
        proc = subprocess.run(
            command,
            input=request.encode("utf-8"),
            capture_output=True,
            timeout=wall,
        )
    except subprocess.TimeoutExpired as exc:
        raise ExternalTimeout(f"runner exceeded wall budget {wall}s") from exc
    except OSError as exc:
        raise ExternalExecError(f"cannot start runner {command!r}: {exc}") from exc

    stdout = proc.stdout.decode("utf-8", errors="replace").strip()
    if not stdout:
        err = proc.stderr.decode("utf-8", errors="replace").strip()
        raise ExternalExecError(f"runner wrote no response (exit {proc.returncode}): {err[:300]}")
    try:
        response = json.loads(stdout.splitlines()[-1])
    except json.JSONDecodeError as exc:
        raise ExternalExecError(f"bad response JSON: {stdout[:300]}") from exc

    status = response.get("status")
    if status == "ok":
        try:
            return _parse_trace(response["trace"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ExternalExecError(f"malformed trace payload: {exc}") from exc
    if status == "timeout":
        raise ExternalTimeout(response.get("error", {}).get("message", "execution timed out"))
    error = response.get("error") or {}
    raise ExternalExecError(
        error.get("message", f"runner failed with status {status!r}"),
        kind=error.get("kind"),
    )
