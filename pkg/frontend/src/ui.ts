// DOM layer: rater entry, side-by-side synchronized playback, axis selectors,
// retry banner, completion screen. Scores are plain integers; the server owns
// all normalization.

import type { RatingSession } from "./session";
import { AXIS_KEYS, type AxisKey } from "./types";

const SCORE_VALUES = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text) node.textContent = text;
  return node;
}

function safePlay(video: HTMLVideoElement): void {
  // play() can reject (autoplay policy) or be unimplemented in test DOMs
  try {
    const result = video.play();
    if (result && typeof result.catch === "function") result.catch(() => undefined);
  } catch {
    /* ignore */
  }
}

function safePause(video: HTMLVideoElement): void {
  try {
    video.pause();
  } catch {
    /* ignore */
  }
}

export class AnnotationApp {
  private focusedAxis: AxisKey = AXIS_KEYS[0];
  private playing = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly session: RatingSession,
  ) {
    session.onChange(() => this.render());
    document.addEventListener("keydown", (event) => this.onKeyDown(event));
  }

  render(): void {
    this.root.textContent = "";
    switch (this.session.phase) {
      case "loading":
      case "submitting":
        this.root.appendChild(el("p", { "data-testid": "status" }, "Working…"));
        if (this.session.phase === "submitting") break;
        break;
      case "rating":
        this.renderTask();
        break;
      case "retry":
        this.renderTask();
        this.renderRetryBanner();
        break;
      case "done":
        this.renderCompletion();
        break;
      default:
        break;
    }
  }

  private renderCompletion(): void {
    const panel = el("div", { class: "completion", "data-testid": "completion" });
    panel.appendChild(el("h2", {}, "All done"));
    panel.appendChild(
      el("p", {}, `You rated ${this.session.ratedCount} video${this.session.ratedCount === 1 ? "" : "s"}. Thank you!`),
    );
    this.root.appendChild(panel);
  }

  private renderRetryBanner(): void {
    const banner = el("div", { class: "retry-banner", "data-testid": "retry-banner" });
    banner.appendChild(
      el("span", {}, "Submission failed — your scores are saved locally. "),
    );
    const button = el("button", { "data-testid": "retry-button" }, "Retry");
    button.addEventListener("click", () => {
      void this.session.retry();
    });
    banner.appendChild(button);
    this.root.appendChild(banner);
  }

  private renderTask(): void {
    const task = this.session.task ?? (this.session.pending ? null : null);
    const container = el("div", { class: "task", "data-testid": "task" });

    if (!task) {
      container.appendChild(el("p", {}, "Submission pending…"));
      this.root.appendChild(container);
      return;
    }

    container.appendChild(el("h2", { "data-testid": "prompt" }, task.edit_prompt));

    const players = el("div", { class: "players" });
    const original = el("video", {
      class: "player",
      "data-testid": "video-original",
      src: task.original_media_url,
      preload: "metadata",
      loop: "loop",
      muted: "muted",
    });
    const edited = el("video", {
      class: "player",
      "data-testid": "video-edited",
      src: task.edited_media_url,
      preload: "metadata",
      loop: "loop",
      muted: "muted",
    });
    const originalPane = el("figure", { class: "pane" });
    originalPane.appendChild(el("figcaption", {}, "Original"));
    originalPane.appendChild(original);
    const editedPane = el("figure", { class: "pane" });
    editedPane.appendChild(el("figcaption", {}, "Edited"));
    editedPane.appendChild(edited);
    players.appendChild(originalPane);
    players.appendChild(editedPane);
    container.appendChild(players);

    // One control drives both videos so temporal judgments stay aligned.
    const playButton = el(
      "button",
      { class: "play-toggle", "data-testid": "play-toggle" },
      this.playing ? "Pause both" : "Play both",
    );
    playButton.addEventListener("click", () => {
      this.playing = !this.playing;
      for (const video of [original, edited]) {
        if (this.playing) {
          video.currentTime = 0;
          safePlay(video);
        } else {
          safePause(video);
        }
      }
      playButton.textContent = this.playing ? "Pause both" : "Play both";
    });
    container.appendChild(playButton);

    for (const axis of task.rubric) {
      container.appendChild(this.renderAxis(axis.key, axis.title, axis.description));
    }

    const submit = el("button", { class: "submit", "data-testid": "submit" }, "Submit rating");
    if (!this.session.canSubmit()) submit.setAttribute("disabled", "disabled");
    submit.addEventListener("click", () => {
      void this.session.submit();
    });
    container.appendChild(submit);
    this.root.appendChild(container);
  }

  private renderAxis(key: AxisKey, title: string, description: string): HTMLElement {
    const group = el("fieldset", {
      class: "axis" + (this.focusedAxis === key ? " focused" : ""),
      "data-testid": `axis-${key}`,
    });
    const legend = el("legend", {}, title);
    legend.addEventListener("click", () => {
      this.focusedAxis = key;
      this.render();
    });
    group.appendChild(legend);
    group.appendChild(el("p", { class: "hint" }, description));

    const row = el("div", { class: "scores" });
    for (const value of SCORE_VALUES) {
      const selected = this.session.selections[key] === value;
      const button = el(
        "button",
        {
          class: "score" + (selected ? " selected" : ""),
          "data-testid": `score-${key}-${value}`,
          "aria-pressed": selected ? "true" : "false",
        },
        String(value),
      );
      button.addEventListener("click", () => {
        this.focusedAxis = key;
        this.session.select(key, value);
      });
      row.appendChild(button);
    }
    group.appendChild(row);
    return group;
  }

  private onKeyDown(event: KeyboardEvent): void {
    if (this.session.phase !== "rating") return;
    if (event.target instanceof HTMLInputElement) return;
    const value = event.key === "0" ? 10 : Number.parseInt(event.key, 10);
    if (!Number.isInteger(value) || value < 1 || value > 10) return;
    const axis = this.focusedAxis;
    this.session.select(axis, value);
    // advance focus so 1-0 keys rate the three axes in sequence
    const index = AXIS_KEYS.indexOf(axis);
    this.focusedAxis = AXIS_KEYS[Math.min(index + 1, AXIS_KEYS.length - 1)];
    this.render();
  }
}

export function renderRaterEntry(root: HTMLElement, onStart: (raterId: string) => void): void {
  root.textContent = "";
  const panel = el("div", { class: "entry", "data-testid": "rater-entry" });
  panel.appendChild(el("h2", {}, "Video edit rating"));
  panel.appendChild(el("p", {}, "Enter your rater id to begin."));
  const input = el("input", { type: "text", placeholder: "rater id", "data-testid": "rater-input" });
  const button = el("button", { "data-testid": "rater-start" }, "Start");
  button.addEventListener("click", () => {
    const raterId = input.value.trim();
    if (raterId) onStart(raterId);
  });
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") button.click();
  });
  panel.appendChild(input);
  panel.appendChild(button);
  root.appendChild(panel);
}
