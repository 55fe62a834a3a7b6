// Browser bootstrap: wire the flow to the page and the keyboard.

import { AnnotationApi } from './api.js';
import { AnnotatorFlow } from './flow.js';

function param(name: string): string | null {
  return new URLSearchParams(window.location.search).get(name);
}

function requireInput(name: string, label: string): string {
  const fromUrl = param(name);
  if (fromUrl) return fromUrl;
  const answer = window.prompt(label);
  if (!answer) throw new Error(`${name} is required`);
  return answer;
}

async function boot(): Promise<void> {
  const app = document.getElementById('app');
  const notice = document.getElementById('notice');
  if (!app || !notice) throw new Error('missing #app/#notice containers');

  const sessionId = requireInput('session', 'Session id:');
  const annotator = requireInput('annotator', 'Your annotator id:');
  document.title = `annotate — ${annotator}`;
  const header = document.getElementById('who');
  if (header) header.textContent = `${annotator} · session ${sessionId}`;

  const flow = new AnnotatorFlow(new AnnotationApi(''), sessionId, annotator, {
    show: (html) => {
      app.innerHTML = html;
    },
    notify: (html) => {
      notice.innerHTML = html;
    },
  });

  window.addEventListener('keydown', (event) => {
    if (event.key === 'a' || event.key === 'A') {
      void flow.showAgreement();
      return;
    }
    void flow.handleKey(event.key);
  });

  await flow.start();
}

void boot();
