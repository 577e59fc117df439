/** DOM wiring: challenge canvas, live stroke overlay, controls, countdown.
 *
 * The challenge renders at native pixel dimensions (1 canvas px = 1
 * challenge px); capture handlers stay non-blocking and only the first
 * pointer contact draws. The stroke overlay uses a mid-gray distinct from
 * both ink and blank so the trace reads against the monochrome challenge.
 */

import { ApiClient } from "./api.js";
import { UiSession } from "./session.js";
import { StrokeRecorder, type CanvasGeometry } from "./strokes.js";

const OVERLAY_COLOR = "#888888";
const OVERLAY_WIDTH = 3;

function el<T extends HTMLElement>(id: string): T {
	const node = document.getElementById(id);
	if (!node) throw new Error(`missing element #${id}`);
	return node as T;
}

function canvasGeometry(canvas: HTMLCanvasElement): CanvasGeometry {
	const rect = canvas.getBoundingClientRect();
	return {
		left: rect.left,
		top: rect.top,
		cssWidth: rect.width,
		cssHeight: rect.height,
		pixelWidth: canvas.width,
		pixelHeight: canvas.height,
	};
}

export function boot(baseUrl = ""): void {
	const challengeCanvas = el<HTMLCanvasElement>("challenge");
	const overlayCanvas = el<HTMLCanvasElement>("overlay");
	const submitButton = el<HTMLButtonElement>("submit");
	const redrawButton = el<HTMLButtonElement>("redraw");
	const statusLine = el<HTMLSpanElement>("status");
	const countdown = el<HTMLSpanElement>("countdown");
	const verdictPanel = el<HTMLDivElement>("verdict");

	const api = new ApiClient(baseUrl);
	const session = new UiSession(api);
	const recorder = new StrokeRecorder();
	let activePointer: number | null = null;

	const overlayCtx = overlayCanvas.getContext("2d")!;

	function drawSegment(from: { x: number; y: number }, to: { x: number; y: number }): void {
		overlayCtx.strokeStyle = OVERLAY_COLOR;
		overlayCtx.lineWidth = OVERLAY_WIDTH;
		overlayCtx.lineCap = "round";
		overlayCtx.beginPath();
		overlayCtx.moveTo(from.x, from.y);
		overlayCtx.lineTo(to.x, to.y);
		overlayCtx.stroke();
	}

	function renderChallengeImage(imageBase64: string, width: number, height: number): void {
		challengeCanvas.width = width;
		challengeCanvas.height = height;
		overlayCanvas.width = width;
		overlayCanvas.height = height;
		const img = new Image();
		img.onload = () => {
			challengeCanvas.getContext("2d")!.drawImage(img, 0, 0);
		};
		img.src = `data:image/png;base64,${imageBase64}`;
	}

	let renderedChallengeId: string | null = null;
	session.onChange((snap) => {
		statusLine.textContent = snap.state;
		submitButton.disabled = !session.canSubmit || snap.state === "submitting";
		redrawButton.disabled = snap.state === "submitting" || snap.state === "loading";
		if (snap.challengeId && snap.challengeId !== renderedChallengeId) {
			renderedChallengeId = snap.challengeId;
			const challenge = session.currentChallenge!;
			renderChallengeImage(challenge.image_base64, challenge.width, challenge.height);
			overlayCtx.clearRect(0, 0, overlayCanvas.width, overlayCanvas.height);
			verdictPanel.textContent = "";
			verdictPanel.className = "";
		}
		if (snap.verdict) {
			verdictPanel.textContent = snap.verdict.passed
				? "Passed — you are human."
				: `Failed (${snap.verdict.reason}). Try a redraw.`;
			verdictPanel.className = snap.verdict.passed ? "pass" : "fail";
		}
		if (snap.error) {
			verdictPanel.textContent = `Error: ${snap.error}`;
			verdictPanel.className = "fail";
		}
	});

	overlayCanvas.addEventListener("pointerdown", (ev) => {
		if (!session.canDraw || activePointer !== null) return;
		activePointer = ev.pointerId;
		overlayCanvas.setPointerCapture(ev.pointerId);
		recorder.begin(ev, canvasGeometry(overlayCanvas));
		ev.preventDefault();
	});

	overlayCanvas.addEventListener("pointermove", (ev) => {
		if (ev.pointerId !== activePointer || !recorder.isRecording) return;
		const points = recorder.livePoints;
		const last = points[points.length - 1];
		const point = recorder.move(ev, canvasGeometry(overlayCanvas));
		if (point && last) drawSegment(last, point);
	});

	const finishStroke = (ev: PointerEvent) => {
		if (ev.pointerId !== activePointer) return;
		activePointer = null;
		const stroke = recorder.end();
		if (stroke) session.addStroke(stroke);
	};
	overlayCanvas.addEventListener("pointerup", finishStroke);
	overlayCanvas.addEventListener("pointercancel", (ev) => {
		if (ev.pointerId !== activePointer) return;
		activePointer = null;
		recorder.cancel();
	});

	submitButton.addEventListener("click", () => void session.submit());
	redrawButton.addEventListener("click", () => void session.redraw());

	setInterval(() => {
		session.tick();
		const snap = session.snapshot();
		countdown.textContent =
			snap.msRemaining === null ? "" : `${Math.ceil(snap.msRemaining / 1000)}s`;
	}, 250);

	void session.load();
}

if (typeof document !== "undefined" && document.getElementById("challenge")) {
	boot();
}
