import { describe, expect, it } from 'vitest';

import { execute } from '../src/executor';
import { parseRequest, ProtocolError } from '../src/protocol';

const ROBE = [
    'def solution():',
    '    # <reason>The robe takes 2 bolts of blue fiber.</reason>',
    '    blue_fiber_bolts = 2 # 2',
    '    # <reason>Half as much white fiber.</reason>',
    '    white_fiber_bolts = blue_fiber_bolts / 2 # 1.0',
    '    # <reason>The total.</reason>',
    '    total_bolts = blue_fiber_bolts + white_fiber_bolts # 3.0',
    '    result = total_bolts # 3.0',
    '    return result',
    '',
].join('\n');

const COMB = [
    'def solution():',
    '    from math import comb',
    '    ways = comb(10, 3)  # 120',
    '    doubled = ways * 2  # 240',
    '    return doubled',
    '',
].join('\n');

function request(source: string, timeoutMs = 2000, whitelist = ['math']) {
    return { source, timeout_ms: timeoutMs, whitelist };
}

async function run(source: string, timeoutMs = 2000) {
    const line = await execute(request(source, timeoutMs));
    return JSON.parse(line);
}

describe('execute', () => {
    it('traces the robe program with exact values and kinds', async () => {
        const resp = await run(ROBE);
        expect(resp.status).toBe('ok');
        expect(resp.trace.entries).toEqual([
            { line: 3, var: 'blue_fiber_bolts', kind: 'int', value: 2 },
            { line: 5, var: 'white_fiber_bolts', kind: 'float', value: 1.0 },
            { line: 7, var: 'total_bolts', kind: 'float', value: 3.0 },
            { line: 8, var: 'result', kind: 'float', value: 3.0 },
        ]);
        expect(resp.trace.result).toEqual({ kind: 'float', value: 3.0 });
    });

    it('supports whitelisted imports inside the function', async () => {
        const resp = await run(COMB);
        expect(resp.status).toBe('ok');
        // the import line produces no entry
        expect(resp.trace.entries).toEqual([
            { line: 3, var: 'ways', kind: 'int', value: 120 },
            { line: 4, var: 'doubled', kind: 'int', value: 240 },
        ]);
        expect(resp.trace.result).toEqual({ kind: 'int', value: 240 });
    });

    it('keeps exponentiation exact for large integers', async () => {
        const source = [
            'def solution():',
            '    a = 18 ** 5  # 1889568',
            '    b = 12 ** 5  # 248832',
            '    c = 15 ** 5  # 759375',
            '    result = a - b + c  # 2400111',
            '    return result',
            '',
        ].join('\n');
        const resp = await run(source);
        expect(resp.status).toBe('ok');
        expect(resp.trace.result).toEqual({ kind: 'int', value: 2400111 });
    });

    it('passes integers beyond double precision through verbatim', async () => {
        const source = 'def solution():\n    big = 10 ** 20\n    return big\n';
        const line = await execute(request(source));
        // the raw line keeps every digit even though JS numbers cannot
        expect(line).toContain('100000000000000000000');
    });

    it('reports a timeout within the wall budget', async () => {
        const spin = 'def solution():\n    while True:\n        pass\n';
        const start = Date.now();
        const resp = await run(spin, 500);
        const wall = Date.now() - start;
        expect(resp.status).toBe('timeout');
        expect(wall).toBeLessThan(1000);
    });

    it('rejects an import outside the whitelist', async () => {
        const resp = await run('import os\n\ndef solution():\n    return 1\n');
        expect(resp.status).toBe('error');
        expect(resp.error.kind).toBe('ImportError');
        expect(resp.error.message).toContain('whitelist');
    });

    it('leaves no filesystem escape hatch in builtins', async () => {
        const resp = await run("def solution():\n    f = open('/etc/hosts')\n    return 1\n");
        expect(resp.status).toBe('error');
        expect(resp.error.kind).toBe('NameError');
    });

    it('reports python errors with their kind', async () => {
        const resp = await run('def solution():\n    return 1 / 0\n');
        expect(resp.status).toBe('error');
        expect(resp.error.kind).toBe('ZeroDivisionError');
    });

    it('reports a missing solution function', async () => {
        const resp = await run('def other():\n    return 1\n');
        expect(resp.status).toBe('error');
        expect(resp.error.message).toContain('solution()');
    });

    it('renders non-numeric values as kind other', async () => {
        const resp = await run("def solution():\n    label = 'hi'\n    flag = True\n    return 1\n");
        expect(resp.status).toBe('ok');
        expect(resp.trace.entries[0]).toMatchObject({ var: 'label', kind: 'other' });
        expect(resp.trace.entries[1]).toMatchObject({ var: 'flag', kind: 'other' });
        expect(resp.trace.result).toEqual({ kind: 'int', value: 1 });
    });

    it('rejects broken python with a syntax error status', async () => {
        const resp = await run('def solution(:\n');
        expect(resp.status).toBe('error');
        expect(resp.error.kind).toBe('SyntaxError');
    });
});

describe('parseRequest', () => {
    it('fills defaults', () => {
        const req = parseRequest(JSON.stringify({ source: 'def solution():\n    return 1\n' }));
        expect(req.timeout_ms).toBe(500);
        expect(req.whitelist).toEqual(['math']);
    });

    it.each([
        ['not json at all', /bad request JSON/],
        ['[1, 2]', /JSON object/],
        ['{"source": ""}', /non-empty/],
        ['{"source": "x", "timeout_ms": 0}', /positive integer/],
        ['{"source": "x", "timeout_ms": 99999999}', /maximum/],
        ['{"source": "x", "whitelist": ["os"]}', /not allowed/],
        ['{"source": "x", "whitelist": "math"}', /array/],
    ])('rejects %s', (text, pattern) => {
        expect(() => parseRequest(text)).toThrow(ProtocolError);
        expect(() => parseRequest(text)).toThrow(pattern);
    });

    it('accepts the full shape', () => {
        const req = parseRequest(
            JSON.stringify({ source: 'x = 1', timeout_ms: 250, whitelist: ['math', 'sympy'] }),
        );
        expect(req).toEqual({ source: 'x = 1', timeout_ms: 250, whitelist: ['math', 'sympy'] });
    });
});
