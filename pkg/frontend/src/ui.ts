// DOM construction and the two operator flows. Takes the document as a
// parameter so tests can drive it under jsdom.

import { PortalClient, PortalError, type Candidate, type PersonRecord } from './api.js';
import {
  RequestGuard,
  applyMatchResponse,
  confirmCandidate,
  initialViewModel,
  validateEnrollForm,
  type ViewModel,
} from './state.js';

export interface UiHandles {
  vm: ViewModel;
  root: HTMLElement;
  setMode(mode: 'enroll' | 'search'): void;
  submitEnroll(): Promise<void>;
  submitSearch(): Promise<void>;
  confirm(personId: string): Promise<void>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderCandidates(
  doc: Document,
  container: HTMLElement,
  candidates: Candidate[],
  onConfirm: (personId: string) => void,
): void {
  container.textContent = '';
  if (candidates.length === 0) {
    container.appendChild(el(doc, 'p', 'empty-state', 'No candidates.'));
    return;
  }
  // Response order preserved exactly; no client-side re-sorting.
  for (const c of candidates) {
    const card = el(doc, 'div', 'candidate-card');
    card.dataset.personId = c.person_id;
    card.appendChild(el(doc, 'h3', 'candidate-name', c.name));
    card.appendChild(el(doc, 'span', `status status-${c.status}`, c.status));
    const stats = el(doc, 'dl', 'candidate-stats');
    for (const [label, value] of [
      ['score', c.score.toFixed(4)],
      ['votes', String(c.votes)],
      ['distance', c.total_distance.toFixed(4)],
    ]) {
      stats.appendChild(el(doc, 'dt', undefined, label));
      stats.appendChild(el(doc, 'dd', undefined, value));
    }
    card.appendChild(stats);
    const button = el(doc, 'button', 'confirm-button', 'Confirm match');
    button.addEventListener('click', () => onConfirm(c.person_id));
    card.appendChild(button);
    container.appendChild(card);
  }
}

export function renderConfirmation(
  doc: Document,
  container: HTMLElement,
  record: PersonRecord,
): void {
  container.textContent = '';
  const box = el(doc, 'div', 'confirmation');
  box.appendChild(el(doc, 'h3', undefined, `Confirmed: ${record.name}`));
  box.appendChild(el(doc, 'p', undefined, `Status: ${record.status}`));
  box.appendChild(el(doc, 'p', 'contact', `Contact: ${record.contact || '(none)'}`));
  container.appendChild(box);
}

export function buildUi(doc: Document, client: PortalClient): UiHandles {
  let vm = initialViewModel();
  const enrollGuard = new RequestGuard();
  const searchGuard = new RequestGuard();

  const root = el(doc, 'div', 'portal-ui');

  // --- tabs ---
  const tabs = el(doc, 'nav', 'tabs');
  const enrollTab = el(doc, 'button', 'tab tab-enroll active', 'Enroll');
  const searchTab = el(doc, 'button', 'tab tab-search', 'Search');
  tabs.append(enrollTab, searchTab);
  root.appendChild(tabs);

  // --- enroll panel ---
  const enrollPanel = el(doc, 'section', 'panel panel-enroll');
  const enrollForm = el(doc, 'form', 'enroll-form');
  enrollForm.addEventListener('submit', (e) => e.preventDefault());
  const photoInput = el(doc, 'input') as HTMLInputElement;
  photoInput.type = 'file';
  photoInput.accept = 'image/png,image/jpeg,image/x-portable-graymap,.pgm';
  photoInput.className = 'photo-input';
  const preview = el(doc, 'img', 'photo-preview') as HTMLImageElement;
  photoInput.addEventListener('change', () => {
    const file = photoInput.files?.[0];
    if (file && typeof URL.createObjectURL === 'function') {
      preview.src = URL.createObjectURL(file);
    }
  });
  const nameInput = el(doc, 'input', 'name-input') as HTMLInputElement;
  nameInput.placeholder = 'Full name';
  const statusSelect = el(doc, 'select', 'status-select') as HTMLSelectElement;
  for (const value of ['missing', 'found']) {
    const opt = el(doc, 'option', undefined, value) as HTMLOptionElement;
    opt.value = value;
    statusSelect.appendChild(opt);
  }
  const contactInput = el(doc, 'input', 'contact-input') as HTMLInputElement;
  contactInput.placeholder = 'Contact details';
  const enrollButton = el(doc, 'button', 'enroll-submit', 'Enroll person');
  const enrollMessage = el(doc, 'p', 'message enroll-message');
  enrollForm.append(photoInput, preview, nameInput, statusSelect, contactInput,
    enrollButton, enrollMessage);
  enrollPanel.appendChild(enrollForm);
  root.appendChild(enrollPanel);

  // --- search panel ---
  const searchPanel = el(doc, 'section', 'panel panel-search hidden');
  const searchForm = el(doc, 'form', 'search-form');
  searchForm.addEventListener('submit', (e) => e.preventDefault());
  const queryInput = el(doc, 'input') as HTMLInputElement;
  queryInput.type = 'file';
  queryInput.className = 'query-input';
  const kSelect = el(doc, 'select', 'k-select') as HTMLSelectElement;
  for (const k of [1, 3, 5, 10]) {
    const opt = el(doc, 'option', undefined, String(k)) as HTMLOptionElement;
    opt.value = String(k);
    if (k === 5) opt.selected = true;
    kSelect.appendChild(opt);
  }
  const filterSelect = el(doc, 'select', 'filter-select') as HTMLSelectElement;
  for (const value of ['', 'missing', 'found']) {
    const opt = el(doc, 'option', undefined, value || 'any status') as HTMLOptionElement;
    opt.value = value;
    filterSelect.appendChild(opt);
  }
  const searchButton = el(doc, 'button', 'search-submit', 'Search');
  const searchMessage = el(doc, 'p', 'message search-message');
  const resultsContainer = el(doc, 'div', 'results');
  const confirmContainer = el(doc, 'div', 'confirmation-area');
  searchForm.append(queryInput, kSelect, filterSelect, searchButton, searchMessage);
  searchPanel.append(searchForm, resultsContainer, confirmContainer);
  root.appendChild(searchPanel);

  function setMode(mode: 'enroll' | 'search'): void {
    vm = { ...vm, mode };
    enrollTab.classList.toggle('active', mode === 'enroll');
    searchTab.classList.toggle('active', mode === 'search');
    enrollPanel.classList.toggle('hidden', mode !== 'enroll');
    searchPanel.classList.toggle('hidden', mode !== 'search');
  }
  enrollTab.addEventListener('click', () => setMode('enroll'));
  searchTab.addEventListener('click', () => setMode('search'));

  async function submitEnroll(): Promise<void> {
    const file = photoInput.files?.[0] ?? null;
    const problem = validateEnrollForm(nameInput.value, file);
    if (problem) {
      enrollMessage.textContent = problem;
      enrollMessage.className = 'message enroll-message error';
      return; // no request sent
    }
    const token = enrollGuard.begin();
    try {
      const id = await client.enroll(file as Blob, {
        name: nameInput.value.trim(),
        status: statusSelect.value as 'missing' | 'found',
        contact: contactInput.value,
      });
      if (!enrollGuard.isCurrent(token)) return;
      enrollMessage.textContent = `Enrolled with id ${id}`;
      enrollMessage.className = 'message enroll-message success';
      nameInput.value = '';
      contactInput.value = '';
      photoInput.value = '';
    } catch (err) {
      if (!enrollGuard.isCurrent(token)) return;
      // service message shown verbatim; network failures get a retry banner
      // with the form state left intact
      const text = err instanceof PortalError
        ? err.message
        : 'Network failure; your input is preserved — retry.';
      enrollMessage.textContent = text;
      enrollMessage.className = 'message enroll-message error';
    }
  }
  enrollButton.addEventListener('click', () => void submitEnroll());

  async function submitSearch(): Promise<void> {
    const file = queryInput.files?.[0] ?? null;
    if (!file) {
      searchMessage.textContent = 'Select a photo first.';
      searchMessage.className = 'message search-message error';
      return;
    }
    const token = searchGuard.begin();
    try {
      const response = await client.match(file, Number(kSelect.value),
        filterSelect.value || undefined);
      if (!searchGuard.isCurrent(token)) return; // stale response
      vm = applyMatchResponse(vm, response.candidates);
      searchMessage.textContent = '';
      confirmContainer.textContent = '';
      renderCandidates(doc, resultsContainer, vm.candidates, (id) => void confirm(id));
    } catch (err) {
      if (!searchGuard.isCurrent(token)) return;
      const text = err instanceof PortalError
        ? err.message
        : 'Network failure; retry.';
      searchMessage.textContent = text;
      searchMessage.className = 'message search-message error';
    }
  }
  searchButton.addEventListener('click', () => void submitSearch());

  async function confirm(personId: string): Promise<void> {
    vm = confirmCandidate(vm, personId);
    if (vm.confirmedId !== personId) return;
    const record = await client.getPerson(personId);
    renderConfirmation(doc, confirmContainer, record);
  }

  return {
    get vm() {
      return vm;
    },
    root,
    setMode,
    submitEnroll,
    submitSearch,
    confirm,
  };
}
