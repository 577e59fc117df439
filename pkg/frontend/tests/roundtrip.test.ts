/** Full round trip against the real verification service: load a challenge
 * over HTTP, script an honest trace through the pointer-capture pipeline,
 * submit, and require a passing verdict.
 *
 * The curve geometry comes from a trusted-side oracle (the spawned server
 * prints it to its own stdout); nothing geometric crosses the HTTP surface.
 * The suite skips when the Python service is unavailable.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { UiSession } from "../src/session.js";
import { StrokeRecorder, type CanvasGeometry } from "../src/strokes.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

function pythonAvailable(): boolean {
	const probe = spawnSync("python3", ["-c", "import curvecaptcha"], { timeout: 20000 });
	return probe.status === 0;
}

const available = pythonAvailable();
const suite = available ? describe : describe.skip;
if (!available) {
	console.warn("roundtrip: python3 + curvecaptcha not importable; skipping live round trip");
}

let server: ChildProcess | null = null;
const oracles = new Map<string, number[][][]>();

async function waitFor(predicate: () => boolean | Promise<boolean>, ms: number): Promise<void> {
	const deadline = Date.now() + ms;
	while (Date.now() < deadline) {
		if (await predicate()) return;
		await new Promise((r) => setTimeout(r, 100));
	}
	throw new Error("timed out waiting for condition");
}

suite("live round trip", () => {
	beforeAll(async () => {
		server = spawn("python3", ["tests/helpers/serve_with_oracle.py", String(PORT)], {
			stdio: ["ignore", "pipe", "inherit"],
		});
		let buffer = "";
		server.stdout!.on("data", (chunk: Buffer) => {
			buffer += chunk.toString();
			let index;
			while ((index = buffer.indexOf("\n")) >= 0) {
				const line = buffer.slice(0, index);
				buffer = buffer.slice(index + 1);
				if (line.startsWith("ORACLE ")) {
					const doc = JSON.parse(line.slice(7)) as { id: string; curves: number[][][] };
					oracles.set(doc.id, doc.curves);
				}
			}
		});
		await waitFor(async () => {
			try {
				const r = await fetch(`${BASE}/v1/healthz`);
				return r.ok;
			} catch {
				return false;
			}
		}, 30000);
	}, 40000);

	afterAll(() => {
		server?.kill();
	});

	async function scriptedSolve(variant: "long" | "short"): Promise<void> {
		const session = new UiSession(new ApiClient(BASE));
		await session.load(variant);
		const snap = session.snapshot();
		expect(snap.state).toBe("drawing");
		const challengeId = snap.challengeId!;
		await waitFor(() => oracles.has(challengeId), 5000);
		const curves = oracles.get(challengeId)!;

		// Display the 480x800 challenge scaled down, as a phone would; the
		// recorder must undo the scaling.
		const geom: CanvasGeometry = {
			left: 16,
			top: 48,
			cssWidth: snap.width / 2,
			cssHeight: snap.height / 2,
			pixelWidth: snap.width,
			pixelHeight: snap.height,
		};
		const recorder = new StrokeRecorder();
		let clock = 1000;
		for (const series of curves) {
			const toClient = (p: number[]) => ({
				clientX: geom.left + (p[0]! * geom.cssWidth) / geom.pixelWidth,
				clientY: geom.top + (p[1]! * geom.cssHeight) / geom.pixelHeight,
				timeStamp: (clock += 16),
			});
			recorder.begin(toClient(series[0]!), geom);
			for (const p of series.slice(1)) recorder.move(toClient(p), geom);
			const stroke = recorder.end();
			expect(stroke).not.toBeNull();
			expect(session.addStroke(stroke!)).toBe(true);
		}

		const verdict = await session.submit();
		expect(verdict).not.toBeNull();
		expect(verdict!.reason).toBe("ok");
		expect(verdict!.passed).toBe(true);
		expect(session.snapshot().state).toBe("verdict-shown");
	}

	it("solves a long challenge end to end", async () => {
		await scriptedSolve("long");
	}, 30000);

	it("solves a short challenge end to end (three strokes)", async () => {
		await scriptedSolve("short");
	}, 30000);

	it("redraw invalidates the old challenge on the real server", async () => {
		const session = new UiSession(new ApiClient(BASE));
		await session.load("long");
		const oldId = session.snapshot().challengeId!;
		await waitFor(() => oracles.has(oldId), 5000);
		const oldCurves = oracles.get(oldId)!;
		await session.redraw();
		expect(session.snapshot().challengeId).not.toBe(oldId);

		// Submitting the old challenge's honest trace against the old id via
		// a fresh client must come back consumed.
		const api = new ApiClient(BASE);
		const strokes = oldCurves.map((series) =>
			series.map((p, i) => ({ x: p[0]!, y: p[1]!, t: i * 16 })),
		);
		const verdict = await api.verify(oldId, strokes);
		expect(verdict.passed).toBe(false);
		expect(verdict.reason).toBe("consumed");
	}, 30000);

	it("sloppy scribble fails with a reason", async () => {
		const session = new UiSession(new ApiClient(BASE));
		await session.load("long");
		const stroke = Array.from({ length: 40 }, (_, i) => ({
			x: 10 + i * 2,
			y: 400,
			t: i * 16,
		}));
		session.addStroke(stroke);
		const verdict = await session.submit();
		expect(verdict!.passed).toBe(false);
		expect(verdict!.reason).not.toBe("ok");
	}, 30000);
});
