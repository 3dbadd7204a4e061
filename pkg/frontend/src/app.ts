// Browser client for the lateralprobe HTTP API.
//
// Talks to exactly two endpoints: POST /probe and POST /feedback. The
// payloads below are the documented wire format; nothing else (no cookies,
// identifiers, or telemetry) is ever sent.

export interface QuestionPayload {
  index: number;
  text: string;
}

export interface SentencePayload {
  text: string;
  citations: number[];
}

export interface SourcePayload {
  doc_number: number;
  url: string;
  title: string;
  cited: boolean;
}

export interface FlagsPayload {
  overlength: boolean;
  unattributed_sentences: number;
  uncited_sources: number[];
}

export interface AnswerPayload {
  sentences: SentencePayload[];
  sources: SourcePayload[];
  flags: FlagsPayload;
  raw_text: string;
}

export interface FailurePayload {
  stage: string;
  code: string;
  message: string;
}

export interface ProbeItemPayload {
  question: QuestionPayload;
  answer?: AnswerPayload;
  failure?: FailurePayload;
}

export interface ProbeResponsePayload {
  input_echo_word_count: number;
  items: ProbeItemPayload[];
  timing?: Record<string, number>;
  config_snapshot?: Record<string, unknown>;
}

interface ErrorPayload {
  error?: { code?: string; message?: string };
}

// Minimal response surface so tests can intercept with plain objects.
export interface FetchResult {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<FetchResult>;

export type Status = 'idle' | 'probing' | 'done' | 'error';

export interface AppOptions {
  wordLimit?: number;
  fetchFn?: FetchLike;
  baseUrl?: string;
}

export const DEFAULT_WORD_LIMIT = 2000;

/** Word count by the same rule the server applies: maximal runs of
 *  non-whitespace characters. Shared test vectors keep the two in sync. */
export function countWords(text: string): number {
  const trimmed = text.trim();
  if (trimmed === '') return 0;
  return trimmed.split(/\s+/).length;
}

const SIDEBAR_HTML = `
  <h1>Lateral reading, assisted</h1>
  <p>When you are unsure about something you read online, the strongest move is
     not to reread it &mdash; it is to leave the page. Professional fact-checkers
     read <em>laterally</em>: they open new tabs, search for what other,
     independent sources say, and only then judge the original.</p>
  <p>This tool does the tab-opening for you. Paste a claim, a post, or an
     article below and press <strong>Probe</strong>. It will raise five search
     questions the text itself does not answer, look each one up on the web,
     and summarize what it finds &mdash; with a numbered citation on every
     sentence so you can check the sources yourself.</p>
  <p>Sources that were retrieved but never used by an answer are marked, so an
     answer can't quietly ignore a page it was given.</p>
  <div class="privacy">
    <h2>Privacy</h2>
    <p>Probes are anonymous. If you press &ldquo;I like this one&rdquo;, we
       store only the text you probed, the question number, and the question
       text &mdash; never identifiers, addresses, or locations. Your input is
       also processed by the configured language-model provider.</p>
  </div>
`;

const MAIN_HTML = `
  <section class="input-pane">
    <label for="input-text">Text to probe</label>
    <textarea id="input-text" rows="8"
      placeholder="Paste a claim, post, or article (plain text)&hellip;"></textarea>
    <div class="input-row">
      <span id="word-counter">0 / LIMIT words</span>
      <button id="probe-button" disabled>Probe</button>
    </div>
    <p id="input-message" class="message" hidden></p>
  </section>
  <div id="status-banner" class="banner" hidden>
    <span id="status-text"></span>
    <button id="retry-button" hidden>Retry</button>
  </div>
  <section id="cards" aria-live="polite"></section>
  <div id="toast" class="toast" hidden></div>
`;

export class App {
  status: Status = 'idle';
  pending: Promise<void> | null = null;

  private readonly doc: Document;
  private readonly fetchFn: FetchLike;
  private readonly wordLimit: number;
  private readonly baseUrl: string;
  private probedText = '';
  private liked = new Set<number>();
  private likeInFlight = new Set<number>();

  private readonly input: HTMLTextAreaElement;
  private readonly counter: HTMLElement;
  private readonly probeButton: HTMLButtonElement;
  private readonly inputMessage: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly statusText: HTMLElement;
  private readonly retryButton: HTMLButtonElement;
  private readonly cards: HTMLElement;
  private readonly toast: HTMLElement;

  constructor(container: HTMLElement, options: AppOptions = {}) {
    this.doc = container.ownerDocument;
    this.wordLimit = options.wordLimit ?? DEFAULT_WORD_LIMIT;
    this.baseUrl = options.baseUrl ?? '';
    const defaultFetch: FetchLike = (url, init) => fetch(url, init);
    this.fetchFn = options.fetchFn ?? defaultFetch;

    container.innerHTML = `
      <div class="layout">
        <aside class="sidebar">${SIDEBAR_HTML}</aside>
        <main class="main">${MAIN_HTML.replace('LIMIT', String(this.wordLimit))}</main>
      </div>
    `;

    const get = <T extends HTMLElement>(id: string) =>
      container.querySelector<T>(`#${id}`)!;
    this.input = get<HTMLTextAreaElement>('input-text');
    this.counter = get('word-counter');
    this.probeButton = get<HTMLButtonElement>('probe-button');
    this.inputMessage = get('input-message');
    this.banner = get('status-banner');
    this.statusText = get('status-text');
    this.retryButton = get<HTMLButtonElement>('retry-button');
    this.cards = get('cards');
    this.toast = get('toast');

    this.input.addEventListener('input', () => this.onInput());
    this.probeButton.addEventListener('click', () => {
      this.pending = this.runProbe();
    });
    this.retryButton.addEventListener('click', () => {
      this.pending = this.runProbe();
    });
    this.onInput();
  }

  private onInput(): void {
    const count = countWords(this.input.value);
    this.counter.textContent = `${count} / ${this.wordLimit} words`;
    const over = count > this.wordLimit;
    this.counter.classList.toggle('over', over);
    if (over) {
      this.showInputMessage(
        `Too long: ${count} words. The limit is ${this.wordLimit} words; trim the text to probe it.`,
      );
    } else {
      this.hideInputMessage();
    }
    this.probeButton.disabled = count === 0 || over || this.status === 'probing';
  }

  private showInputMessage(text: string): void {
    this.inputMessage.textContent = text;
    this.inputMessage.hidden = false;
  }

  private hideInputMessage(): void {
    this.inputMessage.hidden = true;
    this.inputMessage.textContent = '';
  }

  private setStatus(status: Status, text = ''): void {
    this.status = status;
    this.statusText.textContent = text;
    this.banner.hidden = status !== 'probing' && status !== 'error';
    this.retryButton.hidden = status !== 'error';
    this.onInput();
  }

  async runProbe(): Promise<void> {
    if (this.status === 'probing') return;
    const text = this.input.value;
    if (countWords(text) === 0 || countWords(text) > this.wordLimit) return;
    this.probedText = text;
    this.liked = new Set();
    this.likeInFlight = new Set();
    this.cards.replaceChildren();
    this.setStatus('probing', 'Probing… generating questions and reading sources.');
    let result: FetchResult;
    try {
      result = await this.fetchFn(`${this.baseUrl}/probe`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ text }),
      });
    } catch {
      this.setStatus('error', 'Could not reach the probe service. Your text is untouched.');
      return;
    }
    if (result.status === 400) {
      const payload = (await result.json().catch(() => ({}))) as ErrorPayload;
      this.setStatus('idle');
      this.showInputMessage(payload.error?.message ?? 'The service rejected this input.');
      return;
    }
    if (!result.ok) {
      this.setStatus('error', `Probe failed (status ${result.status}). You can retry.`);
      return;
    }
    const payload = (await result.json()) as ProbeResponsePayload;
    this.renderCards(payload);
    this.setStatus('done');
  }

  renderCards(payload: ProbeResponsePayload): void {
    const items = [...payload.items].sort((a, b) => a.question.index - b.question.index);
    this.cards.replaceChildren(...items.map((item) => this.buildCard(item)));
  }

  private el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    className?: string,
    text?: string,
  ): HTMLElementTagNameMap[K] {
    const node = this.doc.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
  }

  private buildCard(item: ProbeItemPayload): HTMLElement {
    const index = item.question.index;
    const card = this.el('article', 'card');
    card.id = `card-${index}`;

    const heading = this.el('h3', 'question');
    heading.append(
      this.el('span', 'question-number', `Q${index}`),
      this.doc.createTextNode(' ' + item.question.text),
    );
    card.append(heading);

    if (item.failure) {
      const failure = this.el(
        'p',
        'card-failure',
        `No answer: ${item.failure.message} (${item.failure.stage}/${item.failure.code})`,
      );
      card.append(failure);
      return card;
    }

    const answer = item.answer!;
    const body = this.el('p', 'answer');
    for (const sentence of answer.sentences) {
      const span = this.el('span', 'sentence', sentence.text + ' ');
      for (const citation of sentence.citations) {
        const sup = this.el('sup', 'citation-chip');
        const link = this.el('a', undefined, `[${citation}]`);
        link.setAttribute('href', `#source-${index}-${citation}`);
        sup.append(link);
        span.append(sup);
        span.append(this.doc.createTextNode(' '));
      }
      body.append(span);
    }
    card.append(body);

    const flags: string[] = [];
    if (answer.flags.overlength) flags.push('answer exceeds the word limit');
    if (answer.flags.unattributed_sentences > 0) {
      flags.push(`${answer.flags.unattributed_sentences} sentence(s) without citations`);
    }
    if (flags.length > 0) {
      card.append(this.el('p', 'card-flags', 'Note: ' + flags.join('; ')));
    }

    const sourcesHeading = this.el('h4', 'sources-heading', 'Sources');
    const sources = this.el('ol', 'sources');
    for (const source of answer.sources) {
      const entry = this.el('li', 'source');
      entry.id = `source-${index}-${source.doc_number}`;
      const link = this.el('a', undefined, source.title || source.url);
      link.setAttribute('href', source.url);
      link.setAttribute('rel', 'noopener noreferrer');
      link.setAttribute('target', '_blank');
      entry.append(link);
      if (!source.cited) {
        entry.append(this.el('span', 'uncited-badge', 'not used in this answer'));
      }
      sources.append(entry);
    }
    card.append(sourcesHeading, sources);

    const likeButton = this.el('button', 'like-button', 'I like this one');
    likeButton.addEventListener('click', () => {
      this.pending = this.like(index, item.question.text, likeButton);
    });
    card.append(likeButton);
    return card;
  }

  async like(index: number, questionText: string, button: HTMLButtonElement): Promise<void> {
    if (this.liked.has(index) || this.likeInFlight.has(index)) return;
    this.likeInFlight.add(index);
    button.disabled = true;
    try {
      const result = await this.fetchFn(`${this.baseUrl}/feedback`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({
          input_text: this.probedText,
          question_index: index,
          question_text: questionText,
        }),
      });
      if (!result.ok) throw new Error(`status ${result.status}`);
      this.liked.add(index);
      button.textContent = 'Liked';
      button.classList.add('liked');
    } catch {
      button.disabled = false;
      this.showToast('Could not record feedback. Try again.');
    } finally {
      this.likeInFlight.delete(index);
    }
  }

  private showToast(text: string): void {
    this.toast.textContent = text;
    this.toast.hidden = false;
    setTimeout(() => {
      this.toast.hidden = true;
    }, 4000);
  }
}

export function createApp(container: HTMLElement, options: AppOptions = {}): App {
  return new App(container, options);
}

// Auto-mount in the browser; tests import and mount explicitly.
if (typeof document !== 'undefined') {
  const mount = document.querySelector<HTMLElement>('#app');
  if (mount && mount.dataset.autoMount !== 'off') {
    createApp(mount);
  }
}
