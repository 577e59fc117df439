import { describe, expect, it } from "vitest";

import { ApiClient, type FetchLike } from "../src/api.js";
import { UiSession } from "../src/session.js";

interface MockState {
	challenges: number;
	verifies: number;
	consumed: Set<string>;
	verdictFor?: (id: string) => Record<string, unknown>;
	failNextCreate?: boolean;
}

function jsonResponse(status: number, body: unknown): Response {
	return new Response(JSON.stringify(body), {
		status,
		headers: { "Content-Type": "application/json" },
	});
}

/** In-memory protocol double implementing the wire contract. */
function mockService(ttlSeconds = 60, now = () => Date.now()): { fetch: FetchLike; state: MockState } {
	const state: MockState = { challenges: 0, verifies: 0, consumed: new Set() };
	const fetch: FetchLike = async (input, init) => {
		const url = String(input);
		if (url.endsWith("/v1/challenge") || /\/refresh$/.test(url)) {
			if (state.failNextCreate) {
				state.failNextCreate = false;
				return jsonResponse(503, { detail: "down" });
			}
			const refreshMatch = url.match(/\/v1\/challenge\/([^/]+)\/refresh$/);
			if (refreshMatch) state.consumed.add(decodeURIComponent(refreshMatch[1]!));
			state.challenges += 1;
			return jsonResponse(201, {
				id: `ch-${state.challenges}`,
				image_base64: "aW1n",
				width: 480,
				height: 800,
				variant: "long",
				expires_at: now() / 1000 + ttlSeconds,
			});
		}
		if (url.endsWith("/v1/verify")) {
			state.verifies += 1;
			const body = JSON.parse(String(init?.body ?? "{}")) as { id: string };
			if (state.consumed.has(body.id)) {
				return jsonResponse(200, {
					passed: false, reason: "consumed", z_x: null, z_y: null, mean_dist: null, coverage: null,
				});
			}
			state.consumed.add(body.id);
			const verdict = state.verdictFor?.(body.id) ?? {
				passed: true, reason: "ok", z_x: 0, z_y: 0, mean_dist: 0, coverage: 1,
			};
			return jsonResponse(200, verdict);
		}
		return jsonResponse(404, { detail: "no route" });
	};
	return { fetch, state };
}

const STROKE = [
	{ x: 1, y: 2, t: 0 },
	{ x: 3, y: 4, t: 16 },
];

describe("UiSession", () => {
	it("loads into drawing state with the challenge dimensions", async () => {
		const { fetch } = mockService();
		const session = new UiSession(new ApiClient("", fetch));
		await session.load("long");
		const snap = session.snapshot();
		expect(snap.state).toBe("drawing");
		expect(snap.width).toBe(480);
		expect(snap.height).toBe(800);
		expect(snap.challengeId).toBe("ch-1");
		expect(snap.strokes).toHaveLength(0);
	});

	it("redraw clears strokes, swaps challenge id, invalidates the old one", async () => {
		const { fetch, state } = mockService();
		const session = new UiSession(new ApiClient("", fetch));
		await session.load();
		session.addStroke(STROKE);
		expect(session.snapshot().strokes).toHaveLength(1);
		const oldId = session.snapshot().challengeId!;
		await session.redraw();
		const snap = session.snapshot();
		expect(snap.challengeId).not.toBe(oldId);
		expect(snap.strokes).toHaveLength(0);
		expect(state.consumed.has(oldId)).toBe(true);
	});

	it("cannot submit with zero strokes", async () => {
		const { fetch, state } = mockService();
		const session = new UiSession(new ApiClient("", fetch));
		await session.load();
		expect(session.canSubmit).toBe(false);
		expect(await session.submit()).toBeNull();
		expect(state.verifies).toBe(0);
	});

	it("double-submit sends exactly one request", async () => {
		const { fetch, state } = mockService();
		const session = new UiSession(new ApiClient("", fetch));
		await session.load();
		session.addStroke(STROKE);
		const [a, b] = await Promise.all([session.submit(), session.submit()]);
		expect(state.verifies).toBe(1);
		expect([a, b].filter((v) => v !== null)).toHaveLength(1);
	});

	it("shows the verdict from the response", async () => {
		const { fetch, state } = mockService();
		state.verdictFor = () => ({
			passed: false, reason: "z-reject-x", z_x: 9.9, z_y: 0, mean_dist: 3, coverage: 0.9,
		});
		const session = new UiSession(new ApiClient("", fetch));
		await session.load();
		session.addStroke(STROKE);
		const verdict = await session.submit();
		expect(verdict?.passed).toBe(false);
		const snap = session.snapshot();
		expect(snap.state).toBe("verdict-shown");
		expect(snap.verdict?.reason).toBe("z-reject-x");
	});

	it("expires via the clock and refuses drawing afterwards", async () => {
		let nowMs = 1_000_000;
		const { fetch } = mockService(60, () => nowMs);
		const session = new UiSession(new ApiClient("", fetch), () => nowMs);
		await session.load();
		expect(session.canDraw).toBe(true);
		nowMs += 61_000;
		session.tick();
		const snap = session.snapshot();
		expect(snap.state).toBe("expired");
		expect(session.canDraw).toBe(false);
		expect(session.addStroke(STROKE)).toBe(false);
		expect(await session.submit()).toBeNull();
	});

	it("countdown reaches zero exactly at expiry", async () => {
		let nowMs = 5_000_000;
		const { fetch } = mockService(30, () => nowMs);
		const session = new UiSession(new ApiClient("", fetch), () => nowMs);
		await session.load();
		expect(session.snapshot().msRemaining).toBe(30_000);
		nowMs += 30_000;
		expect(session.snapshot().msRemaining).toBe(0);
	});

	it("keeps the previous session with an error banner on network failure", async () => {
		const { fetch, state } = mockService();
		const session = new UiSession(new ApiClient("", fetch));
		await session.load();
		session.addStroke(STROKE);
		const oldId = session.snapshot().challengeId;
		state.failNextCreate = true;
		await session.redraw();
		const snap = session.snapshot();
		expect(snap.challengeId).toBe(oldId);
		expect(snap.error).toContain("503");
		expect(snap.state).toBe("drawing");
	});

	it("never exposes curve geometry fields", async () => {
		const { fetch } = mockService();
		const session = new UiSession(new ApiClient("", fetch));
		await session.load();
		const snap = session.snapshot() as unknown as Record<string, unknown>;
		const forbidden = ["curve", "curves", "samples", "control_points", "segments"];
		for (const key of forbidden) expect(key in snap).toBe(false);
	});
});
