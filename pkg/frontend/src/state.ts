// View state shared by the two flows. The candidate list always mirrors
// the service response order; nothing here sorts or rescores.

import type { Candidate } from './api.js';

export type Mode = 'enroll' | 'search';

export interface ViewModel {
  mode: Mode;
  candidates: Candidate[];
  confirmedId: string | null;
}

export function initialViewModel(): ViewModel {
  return { mode: 'enroll', candidates: [], confirmedId: null };
}

/** Adopt a service response; any prior confirmation no longer applies. */
export function applyMatchResponse(vm: ViewModel, candidates: Candidate[]): ViewModel {
  return { ...vm, candidates: [...candidates], confirmedId: null };
}

export function confirmCandidate(vm: ViewModel, personId: string): ViewModel {
  if (!vm.candidates.some((c) => c.person_id === personId)) return vm;
  return { ...vm, confirmedId: personId };
}

/**
 * Tracks at most one in-flight request per flow; responses from superseded
 * submissions are discarded.
 */
export class RequestGuard {
  private seq = 0;

  begin(): number {
    return ++this.seq;
  }

  isCurrent(token: number): boolean {
    return token === this.seq;
  }
}

export function validateEnrollForm(name: string, file: File | Blob | null): string | null {
  if (!file) return 'Select a photo first.';
  if (!name.trim()) return 'Name must not be empty.';
  return null;
}
