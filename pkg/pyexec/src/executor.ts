import { spawn } from 'child_process';

import { ExecRequest, errorResponse, timeoutResponse } from './protocol';
import { TRACER_SOURCE } from './generated/tracerSource';

// extra wall time past the request deadline before the child is killed;
// the tracer normally reports its own timeout well inside this
const KILL_GRACE_MS = 250;

const PYTHON = process.env.PYEXEC_PYTHON || 'python3';

/**
 * Run one request in a fresh python process and return the JSON
 * response line to emit.
 *
 * The tracer's stdout is forwarded verbatim (after validation), never
 * re-serialized, so large integers survive the node boundary exactly.
 */
export function execute(request: ExecRequest): Promise<string> {
    return new Promise((resolve) => {
        let child;
        try {
            child = spawn(PYTHON, ['-c', TRACER_SOURCE], { stdio: ['pipe', 'pipe', 'pipe'] });
        } catch (err) {
            resolve(errorResponse('spawn', err instanceof Error ? err.message : String(err)));
            return;
        }

        let stdout = '';
        let stderr = '';
        let killed = false;
        let settled = false;

        const killTimer = setTimeout(() => {
            killed = true;
            child.kill('SIGKILL');
        }, request.timeout_ms + KILL_GRACE_MS);

        const settle = (line: string) => {
            if (settled) return;
            settled = true;
            clearTimeout(killTimer);
            resolve(line);
        };

        child.stdout.on('data', (chunk: Buffer) => {
            stdout += chunk.toString();
        });
        child.stderr.on('data', (chunk: Buffer) => {
            stderr += chunk.toString();
        });

        child.on('error', (err) => {
            settle(errorResponse('spawn', `cannot run ${PYTHON}: ${err.message}`));
        });

        child.on('close', () => {
            const lines = stdout.trim().split('\n').filter((l) => l.trim() !== '');
            const last = lines.length > 0 ? lines[lines.length - 1] : '';
            if (last !== '') {
                try {
                    const parsed = JSON.parse(last) as { status?: unknown };
                    if (parsed && typeof parsed === 'object' &&
                        (parsed.status === 'ok' || parsed.status === 'error' || parsed.status === 'timeout')) {
                        settle(last);
                        return;
                    }
                } catch {
                    // fall through to the envelope below
                }
            }
            if (killed) {
                settle(timeoutResponse(`killed after ${request.timeout_ms + KILL_GRACE_MS}ms wall`));
            } else {
                settle(errorResponse('protocol', `tracer wrote no valid response: ${stderr.slice(0, 300)}`));
            }
        });

        child.stdin.on('error', () => {
            // child died before reading the request; close handles it
        });
        child.stdin.write(JSON.stringify(request));
        child.stdin.end();
    });
}
