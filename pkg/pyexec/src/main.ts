import { execute } from './executor';
import { ProtocolError, errorResponse, parseRequest } from './protocol';

function readStdin(): Promise<string> {
    return new Promise((resolve, reject) => {
        let data = '';
        process.stdin.setEncoding('utf8');
        process.stdin.on('data', (chunk) => {
            data += chunk;
        });
        process.stdin.on('end', () => resolve(data));
        process.stdin.on('error', reject);
    });
}

async function main(): Promise<number> {
    const text = await readStdin();
    let response: string;
    try {
        const request = parseRequest(text);
        response = await execute(request);
    } catch (err) {
        if (err instanceof ProtocolError) {
            response = errorResponse('protocol', err.message);
        } else {
            throw err;
        }
    }
    process.stdout.write(response + '\n');
    return 0;
}

main()
    .then((code) => process.exit(code))
    .catch((err) => {
        // could not even produce a response envelope
        process.stdout.write(errorResponse('internal', err instanceof Error ? err.message : String(err)) + '\n');
        process.exit(1);
    });
