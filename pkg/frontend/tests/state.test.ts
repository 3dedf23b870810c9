import { describe, expect, it } from 'vitest';
import type { Candidate } from '../src/api.js';
import {
  RequestGuard,
  applyMatchResponse,
  confirmCandidate,
  initialViewModel,
  validateEnrollForm,
} from '../src/state.js';

function cand(id: string): Candidate {
  return { person_id: id, name: id, status: 'missing', score: 0, votes: 0, total_distance: 0 };
}

describe('view model transitions', () => {
  it('adopts candidates in the given order and copies the array', () => {
    const incoming = [cand('c'), cand('a'), cand('b')];
    const vm = applyMatchResponse(initialViewModel(), incoming);
    expect(vm.candidates.map((c) => c.person_id)).toEqual(['c', 'a', 'b']);
    incoming.pop();
    expect(vm.candidates).toHaveLength(3);
  });

  it('clears any previous confirmation when new results arrive', () => {
    let vm = applyMatchResponse(initialViewModel(), [cand('a')]);
    vm = confirmCandidate(vm, 'a');
    expect(vm.confirmedId).toBe('a');
    vm = applyMatchResponse(vm, [cand('b')]);
    expect(vm.confirmedId).toBeNull();
  });

  it('ignores confirmation of an id not in the candidate list', () => {
    const vm = confirmCandidate(applyMatchResponse(initialViewModel(), [cand('a')]), 'zz');
    expect(vm.confirmedId).toBeNull();
  });
});

describe('RequestGuard', () => {
  it('marks earlier tokens stale once a newer request begins', () => {
    const guard = new RequestGuard();
    const first = guard.begin();
    expect(guard.isCurrent(first)).toBe(true);
    const second = guard.begin();
    expect(guard.isCurrent(first)).toBe(false);
    expect(guard.isCurrent(second)).toBe(true);
  });
});

describe('validateEnrollForm', () => {
  const file = new Blob([new Uint8Array([0])]);

  it('requires a photo before anything else', () => {
    expect(validateEnrollForm('', null)).toBe('Select a photo first.');
  });

  it('rejects blank names', () => {
    expect(validateEnrollForm('   ', file)).toBe('Name must not be empty.');
  });

  it('accepts a photo plus non-empty name', () => {
    expect(validateEnrollForm('Ada', file)).toBeNull();
  });
});
