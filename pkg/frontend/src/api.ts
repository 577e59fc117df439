/** Typed client for the challenge/verify HTTP protocol.
 *
 * The server never sends curve geometry; payloads carry only the rasterized
 * image and bookkeeping fields, and this client stores nothing else.
 */

export interface ChallengePayload {
	id: string;
	image_base64: string;
	width: number;
	height: number;
	variant: "long" | "short";
	expires_at: number; // unix epoch seconds
}

export interface WirePoint {
	x: number;
	y: number;
	t: number;
}

export type Stroke = WirePoint[];

export interface VerdictPayload {
	passed: boolean;
	reason: string;
	z_x: number | null;
	z_y: number | null;
	mean_dist: number | null;
	coverage: number | null;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
	constructor(
		message: string,
		readonly status?: number,
	) {
		super(message);
		this.name = "ApiError";
	}
}

function checkChallengePayload(body: unknown): ChallengePayload {
	const p = body as Partial<ChallengePayload> | null;
	if (
		!p ||
		typeof p.id !== "string" ||
		typeof p.image_base64 !== "string" ||
		typeof p.width !== "number" ||
		typeof p.height !== "number" ||
		(p.variant !== "long" && p.variant !== "short") ||
		typeof p.expires_at !== "number"
	) {
		throw new ApiError("malformed challenge payload");
	}
	return p as ChallengePayload;
}

export class ApiClient {
	constructor(
		private readonly baseUrl: string = "",
		private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
	) {}

	private async post(path: string, body?: unknown): Promise<unknown> {
		let response: Response;
		try {
			response = await this.fetchImpl(`${this.baseUrl}${path}`, {
				method: "POST",
				headers: { "Content-Type": "application/json" },
				body: body === undefined ? "{}" : JSON.stringify(body),
			});
		} catch (err) {
			throw new ApiError(`network failure: ${String(err)}`);
		}
		if (!response.ok) {
			throw new ApiError(`server returned ${response.status}`, response.status);
		}
		return response.json();
	}

	async createChallenge(variant?: "long" | "short"): Promise<ChallengePayload> {
		const body = variant ? { variant } : {};
		return checkChallengePayload(await this.post("/v1/challenge", body));
	}

	async refreshChallenge(oldId: string): Promise<ChallengePayload> {
		return checkChallengePayload(await this.post(`/v1/challenge/${encodeURIComponent(oldId)}/refresh`));
	}

	async verify(id: string, strokes: Stroke[]): Promise<VerdictPayload> {
		const body = (await this.post("/v1/verify", { id, strokes })) as VerdictPayload;
		if (typeof body?.passed !== "boolean" || typeof body?.reason !== "string") {
			throw new ApiError("malformed verdict payload");
		}
		return body;
	}
}
