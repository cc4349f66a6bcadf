/** Application controller: wires the state machine, the API client and the
 * screen renderers; every server interaction failure renders a retry
 * affordance without losing local state. */

import { ApiError, TrialApi } from "./api.js";
import type { ComparisonBundle, Demographics, ElicitationItem, LikertAnswer, LikertResponse } from "./api.js";
import {
  ScreenState,
  StateStore,
  advance,
  allAnswered,
  initialState,
  reconcile,
  setAnswer,
  toggleSelection,
} from "./state.js";
import {
  renderComparison,
  renderConsent,
  renderDemographics,
  renderDone,
  renderError,
  renderProfilePicker,
  renderResults,
} from "./views.js";

export class TrialApp {
  state: ScreenState;
  private elicitation: ElicitationItem[] | null = null;
  private bundle: ComparisonBundle | null = null;
  private inlineError: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: TrialApi,
    private readonly store: StateStore,
  ) {
    this.state = store.load();
  }

  private commit(next: ScreenState): void {
    this.state = next;
    this.store.save(next);
  }

  /** Reconcile the locally persisted step with the service's view of the
   * session, then render.  Unknown or expired sessions fall back to the
   * demographics step with a fresh session. */
  async start(): Promise<void> {
    if (this.state.sessionId) {
      try {
        const status = await this.api.sessionState(this.state.sessionId);
        this.commit(reconcile(this.state, status.state));
      } catch (err) {
        if (err instanceof ApiError && err.retryable) {
          this.renderRetry(err, () => this.start());
          return;
        }
        this.commit({ ...initialState(), step: "consent" });
      }
    }
    await this.render();
  }

  private renderRetry(err: unknown, retry: () => void): void {
    const message = err instanceof Error ? err.message : String(err);
    renderError(this.root, message, retry);
  }

  async render(): Promise<void> {
    switch (this.state.step) {
      case "consent":
        renderConsent(this.root, () => {
          this.commit(advance(this.state, "demographics"));
          void this.render();
        });
        return;
      case "demographics":
        renderDemographics(this.root, (demographics) => void this.submitDemographics(demographics));
        return;
      case "profile":
        await this.renderProfile();
        return;
      case "comparison":
      case "questions":
        await this.renderComparisonPage();
        return;
      case "done":
        renderDone(this.root);
        return;
    }
  }

  private async submitDemographics(demographics: Demographics): Promise<void> {
    try {
      const created = await this.api.createSession(demographics);
      this.commit({ ...this.state, demographics, sessionId: created.session_id, step: "profile" });
      await this.render();
    } catch (err) {
      this.renderRetry(err, () => void this.submitDemographics(demographics));
    }
  }

  private async renderProfile(): Promise<void> {
    if (!this.state.sessionId) {
      this.commit({ ...this.state, step: "demographics" });
      await this.render();
      return;
    }
    if (this.elicitation === null) {
      try {
        const payload = await this.api.elicitation(this.state.sessionId);
        this.elicitation = payload.items;
      } catch (err) {
        this.renderRetry(err, () => void this.renderProfile());
        return;
      }
    }
    renderProfilePicker(this.root, this.elicitation, this.state.selections, {
      onToggle: (item) => {
        this.commit(toggleSelection(this.state, item));
        void this.renderProfile();
      },
      onContinue: () => void this.submitProfile(),
    });
  }

  private async submitProfile(): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      this.bundle = await this.api.submitProfile(this.state.sessionId, this.state.selections);
      this.commit(advance(this.state, "comparison"));
      await this.render();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // profile already recorded on the service: move forward, not back
        this.commit(advance(this.state, "comparison"));
        await this.render();
        return;
      }
      this.renderRetry(err, () => void this.submitProfile());
    }
  }

  private async renderComparisonPage(): Promise<void> {
    if (!this.state.sessionId) {
      this.commit({ ...this.state, step: "demographics" });
      await this.render();
      return;
    }
    if (this.bundle === null) {
      try {
        this.bundle = await this.api.comparison(this.state.sessionId);
      } catch (err) {
        this.renderRetry(err, () => void this.renderComparisonPage());
        return;
      }
    }
    renderComparison(
      this.root,
      this.bundle,
      this.state.answers,
      {
        onAnswer: (questionId, answer: LikertAnswer) => {
          this.commit(advance(setAnswer(this.state, questionId, answer), "questions"));
          void this.renderComparisonPage();
        },
        onSubmit: () => void this.submitAnswers(),
      },
      this.inlineError,
    );
  }

  private async submitAnswers(): Promise<void> {
    if (!this.state.sessionId || !this.bundle) return;
    const questionIds = this.bundle.questions.map((q) => q.question_id);
    if (!allAnswered(this.state, questionIds)) {
      return;
    }
    const responses: LikertResponse[] = questionIds.map((id) => ({
      question_id: id,
      answer: this.state.answers[id] as LikertAnswer,
    }));
    try {
      await this.api.submitResponses(this.state.sessionId, responses);
      this.inlineError = null;
      this.commit(advance(this.state, "done"));
      await this.render();
    } catch (err) {
      // answers stay in local state; surface the rejection inline
      this.inlineError = err instanceof Error ? err.message : String(err);
      await this.renderComparisonPage();
    }
  }
}

export class ResultsApp {
  private payload = null as import("./api.js").ExportPayload | null;
  private error: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: TrialApi,
  ) {}

  render(): void {
    renderResults(this.root, this.payload, (secret) => void this.load(secret), this.error);
  }

  async load(secret: string): Promise<void> {
    try {
      this.payload = await this.api.exportResults(secret);
      this.error = null;
    } catch (err) {
      this.error = err instanceof Error ? err.message : String(err);
      this.payload = null;
    }
    this.render();
  }
}
