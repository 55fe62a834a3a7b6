// Pure render functions: service payloads in, HTML strings out.
// Every number shown comes verbatim from a payload field; the only
// formatting applied is decimal truncation for display, and the
// snapshot tests pin exactly that.

import type { AgreementReport, CandidatePayload, Progress } from './api.js';
import { bandFor } from './bands.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderProgress(annotator: string, progress: Progress): string {
  return `<div class="progress">${escapeHtml(annotator)}: ${progress.labeled}/${progress.total}</div>`;
}

export function renderCandidate(
  candidate: CandidatePayload,
  examples: string[],
  progress: Progress,
): string {
  const rows = examples
    .slice(0, 3)
    .map((text) => `<blockquote class="example">${escapeHtml(text)}</blockquote>`)
    .join('');
  return `
<section class="candidate" data-surface="${escapeHtml(candidate.surface)}">
  <h2 class="surface">${escapeHtml(candidate.surface)}</h2>
  <dl class="scores">
    <dt>keyword</dt><dd class="keyword">${escapeHtml(candidate.keyword)}</dd>
    <dt>cosine</dt><dd class="cosine">${candidate.cosine_to_keyword.toFixed(4)}</dd>
    <dt>similarity ratio</dt><dd class="ratio">${candidate.similarity_ratio.toFixed(2)}</dd>
    <dt>edit distance</dt><dd class="distance">${candidate.levenshtein}</dd>
    <dt>rule</dt><dd class="rule">${escapeHtml(candidate.rule_fired)}</dd>
  </dl>
  <div class="examples">${rows || '<p class="no-examples">no context snippets</p>'}</div>
  <p class="keys"><kbd>I</kbd> include &middot; <kbd>E</kbd> exclude</p>
  <div class="progress-line">${progress.labeled}/${progress.total}</div>
</section>`;
}

export function renderDone(waitingFor: string[], progress: Progress): string {
  const waiting =
    waitingFor.length > 0
      ? `<p class="waiting">waiting for ${waitingFor.map(escapeHtml).join(', ')} to finish</p>`
      : '<p class="waiting-none">both annotators finished</p>';
  return `
<section class="done">
  <h2>all candidates labeled</h2>
  <div class="progress-line">${progress.labeled}/${progress.total}</div>
  ${waiting}
</section>`;
}

export function renderAgreement(report: AgreementReport): string {
  const kappa = report.kappa.toFixed(2);
  const band = bandFor(report.kappa);
  const links = report.disagreements
    .map(
      (surface) =>
        `<li><a href="#candidate-${escapeHtml(surface)}" class="disagreement">${escapeHtml(surface)}</a></li>`,
    )
    .join('');
  return `
<section class="agreement">
  <h2>agreement</h2>
  <p class="kappa">&kappa; = <span class="kappa-value">${kappa}</span>
    <span class="kappa-band">(${escapeHtml(band)})</span></p>
  <table class="confusion">
    <tr><th></th><th>B include</th><th>B exclude</th></tr>
    <tr><th>A include</th><td class="both-include">${report.confusion.both_include}</td><td class="a-only">${report.confusion.a_only}</td></tr>
    <tr><th>A exclude</th><td class="b-only">${report.confusion.b_only}</td><td class="both-exclude">${report.confusion.both_exclude}</td></tr>
  </table>
  <p class="coverage">${report.doubly_labeled}/${report.total} doubly labeled</p>
  ${report.disagreements.length ? `<h3>disagreements for discussion</h3><ul class="disagreements">${links}</ul>` : ''}
</section>`;
}

export function renderAgreementEmpty(reason: string): string {
  return `
<section class="agreement empty">
  <h2>agreement</h2>
  <p class="empty-state">not enough data yet: ${escapeHtml(reason)}</p>
</section>`;
}

export function renderNotice(message: string): string {
  return `<div class="notice">${escapeHtml(message)}</div>`;
}

export function renderRetryBanner(message: string): string {
  return `<div class="retry-banner">connection problem: ${escapeHtml(message)} &mdash; press I or E to retry</div>`;
}
