/**
 * Wire protocol: one JSON request on stdin, one JSON response line on
 * stdout. The response envelope is { status: ok | error | timeout }
 * with a trace payload on ok and { kind, message } details on error.
 */

export const MAX_TIMEOUT_MS = 10_000;
export const DEFAULT_TIMEOUT_MS = 500;

// modules the runner is ever willing to expose to a program
export const ALLOWED_MODULES = new Set(['math', 'sympy', 'scipy', 'numpy']);

export interface ExecRequest {
    source: string;
    timeout_ms: number;
    whitelist: string[];
}

export interface TraceValue {
    kind: 'int' | 'float' | 'other';
    value: number | string;
}

export interface TraceEntry extends TraceValue {
    line: number;
    var: string;
}

export interface ExecResponse {
    status: 'ok' | 'error' | 'timeout';
    trace?: { entries: TraceEntry[]; result: TraceValue };
    error?: { kind?: string; message: string };
}

export class ProtocolError extends Error {}

export function parseRequest(text: string): ExecRequest {
    let raw: unknown;
    try {
        raw = JSON.parse(text);
    } catch (err) {
        throw new ProtocolError(`bad request JSON: ${err instanceof Error ? err.message : String(err)}`);
    }
    if (typeof raw !== 'object' || raw === null || Array.isArray(raw)) {
        throw new ProtocolError('request must be a JSON object');
    }
    const req = raw as Record<string, unknown>;

    if (typeof req.source !== 'string' || req.source.trim() === '') {
        throw new ProtocolError('source must be a non-empty string');
    }

    let timeoutMs = DEFAULT_TIMEOUT_MS;
    if (req.timeout_ms !== undefined) {
        if (typeof req.timeout_ms !== 'number' || !Number.isInteger(req.timeout_ms) || req.timeout_ms <= 0) {
            throw new ProtocolError('timeout_ms must be a positive integer');
        }
        if (req.timeout_ms > MAX_TIMEOUT_MS) {
            throw new ProtocolError(`timeout_ms exceeds the ${MAX_TIMEOUT_MS}ms maximum`);
        }
        timeoutMs = req.timeout_ms;
    }

    let whitelist = ['math'];
    if (req.whitelist !== undefined) {
        if (!Array.isArray(req.whitelist) || req.whitelist.some((m) => typeof m !== 'string')) {
            throw new ProtocolError('whitelist must be an array of module names');
        }
        for (const mod of req.whitelist as string[]) {
            if (!ALLOWED_MODULES.has(mod)) {
                throw new ProtocolError(`module not allowed: ${mod}`);
            }
        }
        whitelist = req.whitelist as string[];
    }

    return { source: req.source, timeout_ms: timeoutMs, whitelist };
}

export function errorResponse(kind: string, message: string): string {
    const body: ExecResponse = { status: 'error', error: { kind, message } };
    return JSON.stringify(body);
}

export function timeoutResponse(message: string): string {
    const body: ExecResponse = { status: 'timeout', error: { message } };
    return JSON.stringify(body);
}
