// generated from python/tracer.py by scripts/embed.mjs; do not edit
export const TRACER_SOURCE: string = "\"\"\"Execution core for the sandboxed runner.\n\nReads one JSON request ({\"source\", \"timeout_ms\", \"whitelist\"}) on stdin,\nexecutes the program's solution() under a line tracer, and writes one\nJSON response on stdout. Assignments are attributed by line using the\nAST, so the trace has exactly one entry per executed assignment, in\norder, matching the in-process interpreter's schema.\n\nThe sandbox floor: a stripped builtins table (no open/eval/exec/print),\n__import__ restricted to the request whitelist, and a deadline enforced\nfrom inside the trace hook. The parent process holds a kill timer as the\nbackstop for lines that block without generating trace events.\n\"\"\"\n\nimport ast\nimport json\nimport math\nimport sys\nimport time\n\n\nclass Timeout(Exception):\n    pass\n\n\ndef guarded_import_for(whitelist):\n    real_import = __import__\n\n    def guarded(name, globals=None, locals=None, fromlist=(), level=0):\n        root = name.split(\".\")[0]\n        if level != 0 or root not in whitelist:\n            raise ImportError(f\"import outside whitelist: {name}\")\n        return real_import(name, globals, locals, fromlist, level)\n\n    return guarded\n\n\ndef assign_targets(source):\n    \"\"\"line -> assigned name, for every single-target Assign in the source.\"\"\"\n    targets = {}\n    for node in ast.walk(ast.parse(source)):\n        if (\n            isinstance(node, ast.Assign)\n            and len(node.targets) == 1\n            and isinstance(node.targets[0], ast.Name)\n        ):\n            targets[node.lineno] = node.targets[0].id\n    return targets\n\n\ndef wrap_value(value):\n    # bool is an int subclass; report it as other, not as a number\n    if type(value) is int:\n        return {\"kind\": \"int\", \"value\": value}\n    if type(value) is float and math.isfinite(value):\n        return {\"kind\": \"float\", \"value\": value}\n    return {\"kind\": \"other\", \"value\": repr(value)[:200]}\n\n\ndef run(request):\n    source = request[\"source\"]\n    timeout_ms = int(request.get(\"timeout_ms\", 500))\n    whitelist = set(request.get(\"whitelist\") or [])\n\n    safe_builtins = {\n        \"__import__\": guarded_import_for(whitelist),\n        \"abs\": abs,\n        \"min\": min,\n        \"max\": max,\n        \"round\": round,\n        \"pow\": pow,\n    }\n    namespace = {\"__builtins__\": safe_builtins, \"__name__\": \"solution_module\"}\n    code = compile(source, \"<solution>\", \"exec\")\n    exec(code, namespace)\n\n    fn = namespace.get(\"solution\")\n    if not callable(fn):\n        raise ValueError(\"source does not define a solution() function\")\n\n    targets = assign_targets(source)\n    deadline = time.monotonic() + timeout_ms / 1000.0\n    entries = []\n    pending_line = None\n\n    def record_pending(frame):\n        nonlocal pending_line\n        if pending_line in targets:\n            name = targets[pending_line]\n            if name in frame.f_locals:\n                entry = wrap_value(frame.f_locals[name])\n                entry[\"line\"] = pending_line\n                entry[\"var\"] = name\n                entries.append(entry)\n        pending_line = None\n\n    def local_trace(frame, event, arg):\n        if time.monotonic() > deadline:\n            raise Timeout(f\"exceeded {timeout_ms}ms\")\n        nonlocal pending_line\n        if event == \"line\":\n            record_pending(frame)\n            pending_line = frame.f_lineno\n        elif event == \"return\":\n            record_pending(frame)\n        return local_trace\n\n    def global_trace(frame, event, arg):\n        if frame.f_code is fn.__code__:\n            return local_trace\n        return None\n\n    sys.settrace(global_trace)\n    try:\n        result = fn()\n    finally:\n        sys.settrace(None)\n\n    reordered = [\n        {\"line\": e[\"line\"], \"var\": e[\"var\"], \"kind\": e[\"kind\"], \"value\": e[\"value\"]}\n        for e in entries\n    ]\n    return {\"status\": \"ok\", \"trace\": {\"entries\": reordered, \"result\": wrap_value(result)}}\n\n\ndef main():\n    try:\n        request = json.loads(sys.stdin.read())\n    except ValueError as exc:\n        print(json.dumps({\"status\": \"error\", \"error\": {\"kind\": \"protocol\", \"message\": f\"bad request JSON: {exc}\"}}))\n        return\n    try:\n        response = run(request)\n    except Timeout as exc:\n        response = {\"status\": \"timeout\", \"error\": {\"message\": str(exc)}}\n    except BaseException as exc:\n        response = {\n            \"status\": \"error\",\n            \"error\": {\"kind\": type(exc).__name__, \"message\": str(exc)[:500]},\n        }\n    print(json.dumps(response))\n\n\nif __name__ == \"__main__\":\n    main()\n";
