// The band table is a config asset; the renderer must follow it at the
// boundaries exactly.

import { describe, expect, it } from 'vitest';

import { KAPPA_BANDS, NEGATIVE_LABEL, bandFor } from '../src/bands.js';

describe('kappa bands', () => {
  it('negative kappa reads poor', () => {
    expect(bandFor(-0.3)).toBe(NEGATIVE_LABEL);
  });

  it('upper bounds are inclusive, per the shipped table', () => {
    for (const band of KAPPA_BANDS) {
      expect(bandFor(band.max)).toBe(band.label);
    }
  });

  it('0.40 sits in fair, 0.41 in moderate', () => {
    expect(bandFor(0.4)).toBe('fair');
    expect(bandFor(0.41)).toBe('moderate');
  });

  it('1.0 is almost perfect', () => {
    expect(bandFor(1.0)).toBe('almost perfect');
  });

  it('zero is slight, not poor', () => {
    expect(bandFor(0)).toBe('slight');
  });
});
