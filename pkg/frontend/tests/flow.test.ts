// The scripted two-annotator session, refresh idempotency, conflict
// handling, and the network-loss banner, all against the mock service.

import { describe, expect, it } from 'vitest';

import { AnnotationApi, type Label } from '../src/api.js';
import { AnnotatorFlow, type FlowView } from '../src/flow.js';
import { MockService, makeCandidates } from './mock-service.js';

class RecordingView implements FlowView {
  main = '';
  noticeHtml = '';
  screens: string[] = [];

  show(html: string): void {
    this.main = html;
    this.screens.push(html);
  }

  notify(html: string): void {
    this.noticeHtml = html;
  }
}

function setup(n = 10) {
  const service = new MockService('sess1', ['alice', 'bob'], makeCandidates(n), {
    slav00: ['context a', 'context b'],
  });
  const api = new AnnotationApi('', service.fetch);
  return { service, api };
}

function currentSurface(view: RecordingView): string {
  const match = view.main.match(/data-surface="([^"]+)"/);
  if (!match) throw new Error(`not on a candidate screen:\n${view.main}`);
  return match[1];
}

// The deterministic labeling script used by both routes.
function scriptedLabel(annotator: string, surface: string): Label {
  const index = Number(surface.slice(4));
  if (annotator === 'alice') return index < 6 ? 'include' : 'exclude';
  return index < 4 || index >= 8 ? 'include' : 'exclude';
}

async function driveFlow(service: MockService, annotator: string): Promise<RecordingView> {
  const view = new RecordingView();
  const flow = new AnnotatorFlow(new AnnotationApi('', service.fetch), 'sess1', annotator, view);
  await flow.start();
  while (flow.state === 'labeling') {
    const surface = currentSurface(view);
    const key = scriptedLabel(annotator, surface) === 'include' ? 'i' : 'e';
    await flow.handleKey(key);
  }
  return view;
}

describe('scripted two-annotator session', () => {
  it('matches driving the HTTP API directly', async () => {
    // Route 1: through the UI flow.
    const { service: uiService } = setup(10);
    await driveFlow(uiService, 'alice');
    const bobView = await driveFlow(uiService, 'bob');

    // Route 2: the same labels straight through the API client.
    const { service: directService, api } = setup(10);
    for (const annotator of ['alice', 'bob'] as const) {
      for (const cand of directService.candidates) {
        await api.submitLabel('sess1', annotator, cand.surface, scriptedLabel(annotator, cand.surface));
      }
    }

    const viaUi = uiService.agreementReport();
    const direct = directService.agreementReport();
    expect(viaUi.status).toBe(200);
    expect(viaUi.body).toEqual(direct.body);

    // Both annotators finished, so the UI rendered the agreement panel
    // with the service's kappa verbatim.
    const kappa = (direct.body as { kappa: number }).kappa;
    expect(bobView.main).toContain(`<span class="kappa-value">${kappa.toFixed(2)}</span>`);
  });

  it('labels every candidate exactly once per annotator', async () => {
    const { service } = setup(10);
    await driveFlow(service, 'alice');
    await driveFlow(service, 'bob');
    expect(service.labelCount()).toBe(20);
  });
});

describe('refresh behavior', () => {
  it('a refresh mid-session duplicates no label', async () => {
    const { service } = setup(10);
    const view = new RecordingView();
    let flow = new AnnotatorFlow(new AnnotationApi('', service.fetch), 'sess1', 'alice', view);
    await flow.start();
    for (let i = 0; i < 4; i += 1) {
      await flow.handleKey('i');
    }
    expect(service.progress('alice').labeled).toBe(4);

    // "Refresh": a brand-new flow instance over the same service state.
    const view2 = new RecordingView();
    flow = new AnnotatorFlow(new AnnotationApi('', service.fetch), 'sess1', 'alice', view2);
    await flow.start();
    // The service hands out the first *unlabeled* candidate.
    expect(currentSurface(view2)).toBe('slav04');
    while (flow.state === 'labeling') {
      await flow.handleKey('e');
    }
    expect(service.progress('alice').labeled).toBe(10);
    expect(service.labelCount()).toBe(10); // no duplicates anywhere
  });

  it('ignores keys while a submit is in flight', async () => {
    const { service } = setup(3);
    const view = new RecordingView();
    const flow = new AnnotatorFlow(new AnnotationApi('', service.fetch), 'sess1', 'alice', view);
    await flow.start();
    // Fire two keypresses without awaiting the first: the busy guard
    // must drop the second instead of double-submitting slav00.
    const first = flow.handleKey('i');
    const second = flow.handleKey('e');
    await Promise.all([first, second]);
    expect(service.label('alice', 'slav00')).toBe('include');
    expect(service.progress('alice').labeled).toBe(1);
  });
});

describe('error handling', () => {
  it('conflict answers skip forward with a notice', async () => {
    const { service } = setup(3);
    // Another tab already labeled the first candidate.
    await new AnnotationApi('', service.fetch).submitLabel('sess1', 'alice', 'slav00', 'exclude');

    const view = new RecordingView();
    const flow = new AnnotatorFlow(new AnnotationApi('', service.fetch), 'sess1', 'alice', view);
    // Pretend the tab rendered slav00 before the other tab's submit:
    // force the flow onto it by crafting the start order.
    await flow.start(); // service already skips labeled ones: slav01
    expect(currentSurface(view)).toBe('slav01');
    await flow.handleKey('i');
    expect(currentSurface(view)).toBe('slav02');
    expect(service.label('alice', 'slav01')).toBe('include');
  });

  it('conflict on direct submit surfaces notice and advances', async () => {
    const { service } = setup(2);
    const view = new RecordingView();
    const flow = new AnnotatorFlow(new AnnotationApi('', service.fetch), 'sess1', 'alice', view);
    await flow.start();
    // Sneak a competing label in while the flow shows slav00.
    await new AnnotationApi('', service.fetch).submitLabel('sess1', 'alice', 'slav00', 'exclude');
    await flow.handleKey('i');
    expect(view.noticeHtml).toContain('already labeled');
    expect(currentSurface(view)).toBe('slav01');
    // The competing label stands; nothing was overwritten.
    expect(service.label('alice', 'slav00')).toBe('exclude');
  });

  it('network loss shows the retry banner and invents no label', async () => {
    const { service } = setup(2);
    const view = new RecordingView();
    const flow = new AnnotatorFlow(new AnnotationApi('', service.fetch), 'sess1', 'alice', view);
    await flow.start();
    service.failNext(1);
    await flow.handleKey('i');
    expect(view.noticeHtml).toContain('retry');
    expect(service.labelCount()).toBe(0);
    expect(currentSurface(view)).toBe('slav00'); // still on the same one
    // The next explicit keypress goes through.
    await flow.handleKey('i');
    expect(service.label('alice', 'slav00')).toBe('include');
    expect(view.noticeHtml).toBe('');
  });

  it('done screen names the annotator still working', async () => {
    const { service } = setup(2);
    const view = await driveFlow(service, 'alice');
    expect(view.main).toContain('waiting for bob');
  });

  it('agreement before any double label shows the empty state', async () => {
    const { service } = setup(2);
    const view = new RecordingView();
    const flow = new AnnotatorFlow(new AnnotationApi('', service.fetch), 'sess1', 'alice', view);
    await flow.showAgreement();
    expect(view.main).toContain('not enough data yet');
  });
});
