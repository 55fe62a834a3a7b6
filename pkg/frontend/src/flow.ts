// The annotator flow: one candidate at a time, keyboard-driven, and
// nothing leaves the client without an explicit keypress. The UI only
// advances on a service acknowledgment, so a refresh can never invent
// or duplicate a label; the service's conflict answer skips us forward.

import {
  AnnotationApi,
  ApiError,
  type Label,
  type NextPending,
} from './api.js';
import {
  renderAgreement,
  renderAgreementEmpty,
  renderCandidate,
  renderDone,
  renderNotice,
  renderRetryBanner,
} from './render.js';

export interface FlowView {
  show(html: string): void;
  notify(html: string): void;
}

export type FlowState = 'idle' | 'labeling' | 'done' | 'finished';

export class AnnotatorFlow {
  private current: NextPending | null = null;
  private busy = false;
  private submitted = new Set<string>();
  state: FlowState = 'idle';

  constructor(
    private readonly api: AnnotationApi,
    readonly sessionId: string,
    readonly annotator: string,
    private readonly view: FlowView,
  ) {}

  async start(): Promise<void> {
    await this.advance();
  }

  /** Handle a keypress; only 'i' and 'e' do anything. */
  async handleKey(key: string): Promise<void> {
    const label: Label | null =
      key === 'i' || key === 'I' ? 'include' : key === 'e' || key === 'E' ? 'exclude' : null;
    if (label === null || this.busy || this.state !== 'labeling' || !this.current) {
      return;
    }
    await this.submit(this.current.candidate.surface, label);
  }

  private async submit(candidateId: string, label: Label): Promise<void> {
    if (this.submitted.has(candidateId)) {
      // Already acknowledged once in this tab; never send it twice.
      await this.advance();
      return;
    }
    this.busy = true;
    try {
      await this.api.submitLabel(this.sessionId, this.annotator, candidateId, label);
      this.submitted.add(candidateId);
      this.view.notify('');
      this.busy = false;
      await this.advance();
    } catch (error) {
      this.busy = false;
      if (error instanceof ApiError && error.status === 409) {
        // Someone (e.g. a previous tab) already labeled it: skip ahead.
        this.submitted.add(candidateId);
        this.view.notify(renderNotice(`"${candidateId}" was already labeled; skipped forward`));
        await this.advance();
        return;
      }
      if (error instanceof ApiError) {
        this.view.notify(renderNotice(error.message));
        return;
      }
      // Network failure: keep the candidate, surface a retry banner,
      // and wait for the next explicit keypress.
      this.view.notify(renderRetryBanner(String(error)));
    }
  }

  private async advance(): Promise<void> {
    let next;
    try {
      next = await this.api.next(this.sessionId, this.annotator);
    } catch (error) {
      this.view.notify(renderRetryBanner(String(error)));
      return;
    }
    if (next.done) {
      this.state = next.waiting_for.length === 0 ? 'finished' : 'done';
      this.view.show(renderDone(next.waiting_for, next.progress));
      if (this.state === 'finished') {
        await this.showAgreement();
      }
      return;
    }
    this.current = next;
    this.state = 'labeling';
    this.view.show(renderCandidate(next.candidate, next.examples, next.progress));
  }

  async showAgreement(): Promise<void> {
    try {
      const report = await this.api.agreement(this.sessionId);
      this.view.show(renderAgreement(report));
    } catch (error) {
      if (error instanceof ApiError && error.status === 422) {
        this.view.show(renderAgreementEmpty(error.message));
        return;
      }
      this.view.notify(renderRetryBanner(String(error)));
    }
  }
}
