// @vitest-environment jsdom
//
// DOM behaviour of the two operator flows, driven through buildUi with a
// stubbed client.

import { describe, expect, it, vi, type Mock } from 'vitest';
import type { Candidate, PersonRecord, PortalClient, QueryResponse } from '../src/api.js';
import { PortalError } from '../src/api.js';
import { buildUi, renderCandidates } from '../src/ui.js';

interface StubClient {
  enroll: Mock;
  match: Mock;
  getPerson: Mock;
  health: Mock;
}

function stubClient(): StubClient {
  return { enroll: vi.fn(), match: vi.fn(), getPerson: vi.fn(), health: vi.fn() };
}

function cand(id: string, score: number): Candidate {
  return {
    person_id: id, name: `Name ${id}`, status: 'missing',
    score, votes: 3, total_distance: 1.5,
  };
}

function setFiles(input: HTMLInputElement, file: File | null): void {
  const files = file
    ? ({ 0: file, length: 1, item: (i: number) => (i === 0 ? file : null) } as unknown as FileList)
    : ({ length: 0, item: () => null } as unknown as FileList);
  Object.defineProperty(input, 'files', { value: files, configurable: true });
}

const photoFile = new File([new Uint8Array([9, 9, 9])], 'face.png', { type: 'image/png' });

function build(client: StubClient) {
  const ui = buildUi(document, client as unknown as PortalClient);
  document.body.textContent = '';
  document.body.appendChild(ui.root);
  return ui;
}

function query<T extends Element>(selector: string): T {
  const node = document.querySelector<T>(selector);
  if (!node) throw new Error(`missing element: ${selector}`);
  return node;
}

describe('tabs', () => {
  it('starts on enroll and toggles panel visibility', () => {
    const ui = build(stubClient());
    expect(ui.vm.mode).toBe('enroll');
    expect(query('.panel-search').classList.contains('hidden')).toBe(true);

    query<HTMLButtonElement>('.tab-search').click();
    expect(ui.vm.mode).toBe('search');
    expect(query('.panel-search').classList.contains('hidden')).toBe(false);
    expect(query('.panel-enroll').classList.contains('hidden')).toBe(true);
  });
});

describe('enroll flow', () => {
  it('sends no request when validation fails, and says why', async () => {
    const client = stubClient();
    const ui = build(client);
    setFiles(query('.photo-input'), null);

    await ui.submitEnroll();
    expect(client.enroll).not.toHaveBeenCalled();
    expect(query('.enroll-message').textContent).toBe('Select a photo first.');

    setFiles(query('.photo-input'), photoFile);
    query<HTMLInputElement>('.name-input').value = '  ';
    await ui.submitEnroll();
    expect(client.enroll).not.toHaveBeenCalled();
    expect(query('.enroll-message').textContent).toBe('Name must not be empty.');
  });

  it('reports success with the new id and clears the form', async () => {
    const client = stubClient();
    client.enroll.mockResolvedValue('p-0042');
    const ui = build(client);
    setFiles(query('.photo-input'), photoFile);
    query<HTMLInputElement>('.name-input').value = 'Ada Lovelace';
    query<HTMLInputElement>('.contact-input').value = '555-1234';

    await ui.submitEnroll();

    expect(client.enroll).toHaveBeenCalledTimes(1);
    const [, metadata] = client.enroll.mock.calls[0];
    expect(metadata).toEqual({ name: 'Ada Lovelace', status: 'missing', contact: '555-1234' });
    const message = query('.enroll-message');
    expect(message.textContent).toBe('Enrolled with id p-0042');
    expect(message.classList.contains('success')).toBe(true);
    expect(query<HTMLInputElement>('.name-input').value).toBe('');
  });

  it('shows service errors verbatim', async () => {
    const client = stubClient();
    client.enroll.mockRejectedValue(new PortalError(422, 'unsupported image format'));
    const ui = build(client);
    setFiles(query('.photo-input'), photoFile);
    query<HTMLInputElement>('.name-input').value = 'Ada';

    await ui.submitEnroll();
    const message = query('.enroll-message');
    expect(message.textContent).toBe('unsupported image format');
    expect(message.classList.contains('error')).toBe(true);
  });

  it('keeps the form intact after a network failure', async () => {
    const client = stubClient();
    client.enroll.mockRejectedValue(new TypeError('fetch failed'));
    const ui = build(client);
    setFiles(query('.photo-input'), photoFile);
    query<HTMLInputElement>('.name-input').value = 'Ada';
    query<HTMLInputElement>('.contact-input').value = 'contact';

    await ui.submitEnroll();
    expect(query('.enroll-message').textContent)
      .toBe('Network failure; your input is preserved — retry.');
    expect(query<HTMLInputElement>('.name-input').value).toBe('Ada');
    expect(query<HTMLInputElement>('.contact-input').value).toBe('contact');
  });
});

describe('search flow', () => {
  function response(candidates: Candidate[]): QueryResponse {
    return { candidates, model_version: 'v1' };
  }

  it('renders cards in exactly the response order', async () => {
    const client = stubClient();
    // deliberately not sorted by score: order is the service's business
    client.match.mockResolvedValue(response([cand('q', 0.2), cand('a', 3.0), cand('m', 1.1)]));
    const ui = build(client);
    ui.setMode('search');
    setFiles(query('.query-input'), photoFile);

    await ui.submitSearch();
    const ids = [...document.querySelectorAll<HTMLElement>('.candidate-card')]
      .map((node) => node.dataset.personId);
    expect(ids).toEqual(['q', 'a', 'm']);
    expect(query('.candidate-card .candidate-name').textContent).toBe('Name q');
  });

  it('shows an empty state when there are no candidates', async () => {
    const client = stubClient();
    client.match.mockResolvedValue(response([]));
    const ui = build(client);
    setFiles(query('.query-input'), photoFile);

    await ui.submitSearch();
    expect(query('.results .empty-state').textContent).toBe('No candidates.');
  });

  it('passes k and status filter through to the client', async () => {
    const client = stubClient();
    client.match.mockResolvedValue(response([]));
    const ui = build(client);
    setFiles(query('.query-input'), photoFile);
    query<HTMLSelectElement>('.k-select').value = '3';
    query<HTMLSelectElement>('.filter-select').value = 'found';

    await ui.submitSearch();
    expect(client.match).toHaveBeenCalledWith(photoFile, 3, 'found');
  });

  it('discards a stale response when a newer search supersedes it', async () => {
    const client = stubClient();
    let resolveFirst!: (r: QueryResponse) => void;
    client.match
      .mockImplementationOnce(() => new Promise((resolve) => { resolveFirst = resolve; }))
      .mockImplementationOnce(() => Promise.resolve(response([cand('new', 2)])));
    const ui = build(client);
    setFiles(query('.query-input'), photoFile);

    const first = ui.submitSearch();
    const second = ui.submitSearch();
    await second;
    resolveFirst(response([cand('old', 1)]));
    await first;

    const ids = [...document.querySelectorAll<HTMLElement>('.candidate-card')]
      .map((node) => node.dataset.personId);
    expect(ids).toEqual(['new']);
  });

  it('confirming a card fetches and shows the full record', async () => {
    const record: PersonRecord = {
      id: 'a', name: 'Name a', status: 'found', contact: 'call 555',
      enrolled_at: 123, photo_refs: ['blob1'],
    };
    const client = stubClient();
    client.match.mockResolvedValue(response([cand('a', 2)]));
    client.getPerson.mockResolvedValue(record);
    const ui = build(client);
    setFiles(query('.query-input'), photoFile);

    await ui.submitSearch();
    query<HTMLButtonElement>('.candidate-card .confirm-button').click();
    await vi.waitFor(() => {
      expect(query('.confirmation-area .confirmation h3').textContent)
        .toBe('Confirmed: Name a');
    });
    expect(client.getPerson).toHaveBeenCalledWith('a');
    expect(query('.confirmation .contact').textContent).toBe('Contact: call 555');
    expect(ui.vm.confirmedId).toBe('a');
  });

  it('ignores confirmation for an id that is not on screen', async () => {
    const client = stubClient();
    client.match.mockResolvedValue(response([cand('a', 2)]));
    const ui = build(client);
    setFiles(query('.query-input'), photoFile);

    await ui.submitSearch();
    await ui.confirm('not-there');
    expect(client.getPerson).not.toHaveBeenCalled();
    expect(ui.vm.confirmedId).toBeNull();
  });
});

describe('renderCandidates', () => {
  it('wires one confirm callback per card', () => {
    const container = document.createElement('div');
    const seen: string[] = [];
    renderCandidates(document, container, [cand('x', 1), cand('y', 2)], (id) => seen.push(id));
    const buttons = container.querySelectorAll<HTMLButtonElement>('.confirm-button');
    buttons[1].click();
    buttons[0].click();
    expect(seen).toEqual(['y', 'x']);
  });
});
