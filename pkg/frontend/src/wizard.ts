// Headless wizard controller: one decision at a time against the session
// API. All lattice rules live on the server; the client-side hints here
// (radio semantics for exactly-one decisions, an at-least-one nudge) are UX
// sugar only, and expert mode lifts them entirely so the server-side
// guardrail can be exercised end to end. Nothing the controller does can
// widen what the server accepts.

import { ApiError, NetworkError, type SessionApi } from "./api.js";
import type {
  Progress,
  Question,
  SpecResponse,
  Violation,
} from "./types.js";

export type WizardPhase = "setup" | "question" | "completed" | "aborted";

export interface WizardViewState {
  phase: WizardPhase;
  sessionId: string | null;
  familyId: string | null;
  routed: boolean;
  question: Question | null;
  selected: string[];
  violations: Violation[];
  progress: Progress | null;
  spec: SpecResponse | null;
  expertMode: boolean;
  inlineError: string | null;
  networkError: string | null;
  busy: boolean;
}

function initialState(): WizardViewState {
  return {
    phase: "setup",
    sessionId: null,
    familyId: null,
    routed: false,
    question: null,
    selected: [],
    violations: [],
    progress: null,
    spec: null,
    expertMode: false,
    inlineError: null,
    networkError: null,
    busy: false,
  };
}

export type Listener = (state: WizardViewState) => void;

export class WizardController {
  state: WizardViewState = initialState();
  private listeners: Listener[] = [];
  private retryable: (() => Promise<void>) | null = null;

  constructor(private client: SessionApi) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  setExpertMode(on: boolean): void {
    this.state.expertMode = on;
    this.emit();
  }

  /** Begin a session from a family pick or a free-text vision.
   * An empty form is rejected inline; no request is sent. */
  async start(opts: { familyId?: string; vision?: string }): Promise<void> {
    const familyId = opts.familyId?.trim() || undefined;
    const vision = opts.vision?.trim() || undefined;
    if (!familyId && !vision) {
      this.state.inlineError = "Pick a family or describe your project first.";
      this.emit();
      return;
    }
    this.state.inlineError = null;
    await this.guarded(async () => {
      const created = await this.client.createSession({
        family_id: familyId,
        vision,
      });
      this.state.sessionId = created.session_id;
      this.state.familyId = created.family_id;
      this.state.routed = created.routed;
      if (created.status === "completed") {
        await this.enterCompleted();
      } else {
        await this.refreshQuestion();
      }
    });
  }

  /** Toggle one child id in the pending choice. In normal mode an
   * exactly-one decision behaves like a radio group; expert mode makes
   * every control a free checkbox. */
  toggleChoice(id: string): void {
    if (!this.state.question) return;
    const kind = this.state.question.decision_kind;
    const picked = this.state.selected.includes(id);
    if (picked) {
      this.state.selected = this.state.selected.filter((x) => x !== id);
    } else if (kind === "single_adaptor" && !this.state.expertMode) {
      this.state.selected = [id];
    } else {
      this.state.selected = [...this.state.selected, id];
    }
    this.emit();
  }

  /** The client-side nudge shown before submitting; never enforced in
   * expert mode. The server remains the actual gatekeeper. */
  submitHint(): string | null {
    if (!this.state.question || this.state.expertMode) return null;
    const kind = this.state.question.decision_kind;
    if (kind === "single_adaptor" && this.state.selected.length !== 1) {
      return "Choose exactly one alternative.";
    }
    if (kind === "multiple_adaptor" && this.state.selected.length < 1) {
      return "Choose at least one.";
    }
    return null;
  }

  canSubmit(): boolean {
    return (
      this.state.phase === "question" &&
      !this.state.busy &&
      (this.state.expertMode || this.submitHint() === null)
    );
  }

  async submit(): Promise<void> {
    if (this.state.phase !== "question" || !this.state.sessionId) return;
    const sessionId = this.state.sessionId;
    const choice = [...this.state.selected];
    await this.guarded(async () => {
      const result = await this.client.submitChoice(sessionId, choice);
      if (!result.accepted) {
        // Violation messages are rendered verbatim; selection is kept so
        // the analyst can revise it.
        this.state.violations = result.violations;
        return;
      }
      if (result.next === "completed") {
        await this.enterCompleted();
      } else {
        await this.refreshQuestion();
      }
    });
  }

  /** Re-run the last failed operation after a network error. */
  async retry(): Promise<void> {
    const pending = this.retryable;
    if (pending) {
      await pending();
    }
  }

  private async refreshQuestion(): Promise<void> {
    if (!this.state.sessionId) return;
    const response = await this.client.getQuestion(this.state.sessionId);
    this.state.phase = "question";
    this.state.question = response.question;
    this.state.violations = response.violations;
    this.state.progress = response.progress;
    this.state.selected = [];
  }

  private async enterCompleted(): Promise<void> {
    if (!this.state.sessionId) return;
    this.state.spec = await this.client.getSpec(this.state.sessionId);
    this.state.phase = "completed";
    this.state.question = null;
    this.state.violations = [];
    this.state.selected = [];
  }

  private async guarded(op: () => Promise<void>): Promise<void> {
    this.state.busy = true;
    this.state.networkError = null;
    this.emit();
    try {
      await op();
      this.retryable = null;
    } catch (err) {
      if (err instanceof NetworkError) {
        // State untouched: the retry affordance re-runs the same operation.
        this.state.networkError = err.message;
        this.retryable = () => this.guarded(op);
      } else if (err instanceof ApiError) {
        if (err.code === "wrong_status") {
          // The session moved on (e.g. completed elsewhere); resync.
          await this.resync();
        } else {
          this.state.inlineError = `${err.code}: ${err.message}`;
        }
      } else {
        throw err;
      }
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }

  private async resync(): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      await this.enterCompleted();
    } catch {
      this.state.phase = "aborted";
    }
  }
}
