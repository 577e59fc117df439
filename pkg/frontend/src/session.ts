/** Solver session state machine.
 *
 * One active challenge at a time; strokes clear whenever a new challenge
 * loads; no transition path allows drawing on an expired or consumed
 * challenge; at most one network request is in flight.
 */

import { ApiClient, type ChallengePayload, type Stroke, type VerdictPayload } from "./api.js";

export type SessionState =
	| "idle"
	| "loading"
	| "drawing"
	| "submitting"
	| "verdict-shown"
	| "expired"
	| "error";

export interface SessionSnapshot {
	state: SessionState;
	challengeId: string | null;
	width: number;
	height: number;
	strokes: readonly Stroke[];
	verdict: VerdictPayload | null;
	error: string | null;
	expiresAt: number | null;
	msRemaining: number | null;
}

export type SessionListener = (snapshot: SessionSnapshot) => void;

export class UiSession {
	private state: SessionState = "idle";
	private challenge: ChallengePayload | null = null;
	private strokes: Stroke[] = [];
	private verdict: VerdictPayload | null = null;
	private error: string | null = null;
	private listeners: SessionListener[] = [];

	constructor(
		private readonly api: ApiClient,
		private readonly now: () => number = () => Date.now(),
	) {}

	onChange(listener: SessionListener): void {
		this.listeners.push(listener);
	}

	snapshot(): SessionSnapshot {
		const expiresAt = this.challenge ? this.challenge.expires_at * 1000 : null;
		return {
			state: this.state,
			challengeId: this.challenge?.id ?? null,
			width: this.challenge?.width ?? 0,
			height: this.challenge?.height ?? 0,
			strokes: this.strokes,
			verdict: this.verdict,
			error: this.error,
			expiresAt,
			msRemaining: expiresAt === null ? null : Math.max(0, expiresAt - this.now()),
		};
	}

	get currentChallenge(): ChallengePayload | null {
		return this.challenge;
	}

	private emit(): void {
		const snap = this.snapshot();
		for (const listener of this.listeners) listener(snap);
	}

	private applyChallenge(payload: ChallengePayload): void {
		this.challenge = payload;
		this.strokes = [];
		this.verdict = null;
		this.error = null;
		this.state = "drawing";
		this.emit();
	}

	/** Fetch a fresh challenge; on failure any previous session is retained
	 * with an error banner so the user can retry. */
	async load(variant?: "long" | "short"): Promise<void> {
		if (this.state === "loading" || this.state === "submitting") return;
		const previous = this.state;
		this.state = "loading";
		this.emit();
		try {
			this.applyChallenge(await this.api.createChallenge(variant));
		} catch (err) {
			this.state = this.challenge ? previous : "error";
			this.error = String(err);
			this.emit();
		}
	}

	/** Redraw: invalidate the current challenge server-side and start fresh
	 * with a new background and curve. Allowed from any state but submitting. */
	async redraw(): Promise<void> {
		if (this.state === "submitting" || this.state === "loading") return;
		const oldId = this.challenge?.id;
		const previous = this.state;
		this.state = "loading";
		this.emit();
		try {
			const payload = oldId
				? await this.api.refreshChallenge(oldId)
				: await this.api.createChallenge();
			this.applyChallenge(payload);
		} catch (err) {
			this.state = previous;
			this.error = String(err);
			this.emit();
		}
	}

	/** Clock tick; flips the session to expired when the deadline passes. */
	tick(): void {
		if (this.state !== "drawing") return;
		if (this.challenge && this.now() >= this.challenge.expires_at * 1000) {
			this.state = "expired";
			this.emit();
		}
	}

	get canDraw(): boolean {
		return this.state === "drawing";
	}

	get canSubmit(): boolean {
		return this.state === "drawing" && this.strokes.length > 0;
	}

	addStroke(stroke: Stroke): boolean {
		if (!this.canDraw) return false;
		this.strokes.push(stroke);
		this.emit();
		return true;
	}

	/** Submit captured strokes; single-flight by construction. */
	async submit(): Promise<VerdictPayload | null> {
		if (!this.canSubmit || !this.challenge) return null;
		this.state = "submitting";
		this.emit();
		try {
			const verdict = await this.api.verify(this.challenge.id, this.strokes);
			this.verdict = verdict;
			this.state = verdict.reason === "expired" ? "expired" : "verdict-shown";
			this.emit();
			return verdict;
		} catch (err) {
			this.state = "drawing";
			this.error = String(err);
			this.emit();
			return null;
		}
	}
}
