// Qualitative agreement bands for kappa. This table is a config asset:
// edit the bounds/labels here and the panel follows. Bounds are upper
// bounds, inclusive; anything below zero reads "poor".

export interface Band {
  max: number;
  label: string;
}

export const NEGATIVE_LABEL = 'poor';

export const KAPPA_BANDS: Band[] = [
  { max: 0.2, label: 'slight' },
  { max: 0.4, label: 'fair' },
  { max: 0.6, label: 'moderate' },
  { max: 0.8, label: 'substantial' },
  { max: 1.0, label: 'almost perfect' },
];

export function bandFor(kappa: number, bands: Band[] = KAPPA_BANDS): string {
  if (kappa < 0) return NEGATIVE_LABEL;
  for (const band of bands) {
    if (kappa <= band.max) return band.label;
  }
  return bands[bands.length - 1].label;
}
