/** Stroke capture: maps pointer events into challenge-pixel coordinates.
 *
 * The canvas may be CSS-scaled (including device-pixel-ratio effects), so
 * every recorded point is converted through the live bounding box into the
 * challenge's own pixel grid; the verifier's tolerances live in that space.
 * Timestamps are milliseconds since the stroke began.
 */

import type { Stroke, WirePoint } from "./api.js";

/** Structural subset of PointerEvent, so tests can synthesize sequences. */
export interface PointerSample {
	clientX: number;
	clientY: number;
	timeStamp: number;
}

/** Structural subset of DOMRect plus the canvas pixel dimensions. */
export interface CanvasGeometry {
	left: number;
	top: number;
	cssWidth: number;
	cssHeight: number;
	pixelWidth: number;
	pixelHeight: number;
}

function clamp(v: number, lo: number, hi: number): number {
	return Math.min(Math.max(v, lo), hi);
}

export function toChallengePixels(sample: PointerSample, geom: CanvasGeometry): { x: number; y: number } {
	const scaleX = geom.pixelWidth / geom.cssWidth;
	const scaleY = geom.pixelHeight / geom.cssHeight;
	return {
		x: clamp((sample.clientX - geom.left) * scaleX, 0, geom.pixelWidth - 1),
		y: clamp((sample.clientY - geom.top) * scaleY, 0, geom.pixelHeight - 1),
	};
}

/** Records one stroke at a time; every move event lands in the stroke. */
export class StrokeRecorder {
	private current: WirePoint[] | null = null;
	private startedAt = 0;

	get isRecording(): boolean {
		return this.current !== null;
	}

	/** Points of the stroke being drawn, for live overlay rendering. */
	get livePoints(): readonly WirePoint[] {
		return this.current ?? [];
	}

	begin(sample: PointerSample, geom: CanvasGeometry): WirePoint {
		this.startedAt = sample.timeStamp;
		const { x, y } = toChallengePixels(sample, geom);
		const point = { x, y, t: 0 };
		this.current = [point];
		return point;
	}

	move(sample: PointerSample, geom: CanvasGeometry): WirePoint | null {
		if (!this.current) return null;
		const { x, y } = toChallengePixels(sample, geom);
		const t = Math.max(0, sample.timeStamp - this.startedAt);
		const point = { x, y, t };
		this.current.push(point);
		return point;
	}

	/** Close and return the stroke; empty-ish strokes are discarded. */
	end(): Stroke | null {
		const stroke = this.current;
		this.current = null;
		if (!stroke || stroke.length < 2) return null;
		return stroke;
	}

	cancel(): void {
		this.current = null;
	}
}
