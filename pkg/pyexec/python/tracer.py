"""Execution core for the sandboxed runner.

Reads one JSON request ({"source", "timeout_ms", "whitelist"}) on stdin,
executes the program's solution() under a line tracer, and writes one
JSON response on stdout. Assignments are attributed by line using the
AST, so the trace has exactly one entry per executed assignment, in
order, matching the in-process interpreter's schema.

The sandbox floor: a stripped builtins table (no open/eval/exec/print),
__import__ restricted to the request whitelist, and a deadline enforced
from inside the trace hook. The parent process holds a kill timer as the
backstop for lines that block without generating trace events.
"""

import ast
import json
import math
import sys
import time


class Timeout(Exception):
    pass


def guarded_import_for(whitelist):
    real_import = __import__

    def guarded(name, globals=None, locals=None, fromlist=(), level=0):
        root = name.split(".")[0]
        if level != 0 or root not in whitelist:
            raise ImportError(f"import outside whitelist: {name}")
        return real_import(name, globals, locals, fromlist, level)

    return guarded


def assign_targets(source):
    """line -> assigned name, for every single-target Assign in the source."""
    targets = {}
    for node in ast.walk(ast.parse(source)):
        if (
            isinstance(node, ast.Assign)
            and len(node.targets) == 1
            and isinstance(node.targets[0], ast.Name)
        ):
            targets[node.lineno] = node.targets[0].id
    return targets


def wrap_value(value):
    # bool is an int subclass; report it as other, not as a number
    if type(value) is int:
        return {"kind": "int", "value": value}
    if type(value) is float and math.isfinite(value):
        return {"kind": "float", "value": value}
    return {"kind": "other", "value": repr(value)[:200]}


def run(request):
    source = request["source"]
    timeout_ms = int(request.get("timeout_ms", 500))
    whitelist = set(request.get("whitelist") or [])

    safe_builtins = {
        "__import__": guarded_import_for(whitelist),
        "abs": abs,
        "min": min,
        "max": max,
        "round": round,
        "pow": pow,
    }
    namespace = {"__builtins__": safe_builtins, "__name__": "solution_module"}
    code = compile(source, "<solution>", "exec")
    exec(code, namespace)

    fn = namespace.get("solution")
    if not callable(fn):
        raise ValueError("source does not define a solution() function")

    targets = assign_targets(source)
    deadline = time.monotonic() + timeout_ms / 1000.0
    entries = []
    pending_line = None

    def record_pending(frame):
        nonlocal pending_line
        if pending_line in targets:
            name = targets[pending_line]
            if name in frame.f_locals:
                entry = wrap_value(frame.f_locals[name])
                entry["line"] = pending_line
                entry["var"] = name
                entries.append(entry)
        pending_line = None

    def local_trace(frame, event, arg):
        if time.monotonic() > deadline:
            raise Timeout(f"exceeded {timeout_ms}ms")
        nonlocal pending_line
        if event == "line":
            record_pending(frame)
            pending_line = frame.f_lineno
        elif event == "return":
            record_pending(frame)
        return local_trace

    def global_trace(frame, event, arg):
        if frame.f_code is fn.__code__:
            return local_trace
        return None

    sys.settrace(global_trace)
    try:
        result = fn()
    finally:
        sys.settrace(None)

    reordered = [
        {"line": e["line"], "var": e["var"], "kind": e["kind"], "value": e["value"]}
        for e in entries
    ]
    return {"status": "ok", "trace": {"entries": reordered, "result": wrap_value(result)}}


def main():
    try:
        request = json.loads(sys.stdin.read())
    except ValueError as exc:
        print(json.dumps({"status": "error", "error": {"kind": "protocol", "message": f"bad request JSON: {exc}"}}))
        return
    try:
        response = run(request)
    except Timeout as exc:
        response = {"status": "timeout", "error": {"message": str(exc)}}
    except BaseException as exc:
        response = {
            "status": "error",
            "error": {"kind": type(exc).__name__, "message": str(exc)[:500]},
        }
    print(json.dumps(response))


if __name__ == "__main__":
    main()
