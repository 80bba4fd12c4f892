/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curves_free: (a: number, b: number) => void;
export const __wbg_spectrumview_free: (a: number, b: number) => void;
export const curves_bias: (a: number) => [number, number];
export const curves_total: (a: number) => [number, number];
export const curves_variance: (a: number) => [number, number];
export const curves_x: (a: number) => [number, number];
export const riskCurves: (a: number, b: number) => [number, number, number];
export const spectrum: (a: number, b: number, c: bigint) => [number, number, number];
export const spectrumview_atom: (a: number) => number;
export const spectrumview_density: (a: number) => [number, number];
export const spectrumview_eigenvalues: (a: number) => [number, number];
export const spectrumview_grid: (a: number) => [number, number];
export const spectrumview_ks: (a: number) => number;
export const spectrumview_n: (a: number) => number;
export const staircase: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
