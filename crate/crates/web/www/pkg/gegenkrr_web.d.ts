/* tslint:disable */
/* eslint-disable */

export class Curves {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly bias: Float64Array;
    readonly total: Float64Array;
    readonly variance: Float64Array;
    readonly x: Float64Array;
}

export class SpectrumView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Point mass of the limit law at zero.
     */
    readonly atom: number;
    readonly density: Float64Array;
    readonly eigenvalues: Float64Array;
    readonly grid: Float64Array;
    readonly ks: number;
    readonly n: number;
}

export function riskCurves(zeta: number, sigma_sq: number): Curves;

export function spectrum(d: number, psi: number, seed: bigint): SpectrumView;

export function staircase(d: number, f1: number, f2: number, f3: number, zeta: number, sigma_sq: number): Curves;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curves_free: (a: number, b: number) => void;
    readonly __wbg_spectrumview_free: (a: number, b: number) => void;
    readonly curves_bias: (a: number) => [number, number];
    readonly curves_total: (a: number) => [number, number];
    readonly curves_variance: (a: number) => [number, number];
    readonly curves_x: (a: number) => [number, number];
    readonly riskCurves: (a: number, b: number) => [number, number, number];
    readonly spectrum: (a: number, b: number, c: bigint) => [number, number, number];
    readonly spectrumview_atom: (a: number) => number;
    readonly spectrumview_density: (a: number) => [number, number];
    readonly spectrumview_eigenvalues: (a: number) => [number, number];
    readonly spectrumview_grid: (a: number) => [number, number];
    readonly spectrumview_ks: (a: number) => number;
    readonly spectrumview_n: (a: number) => number;
    readonly staircase: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
