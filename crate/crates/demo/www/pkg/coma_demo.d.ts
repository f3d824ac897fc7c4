/* tslint:disable */
/* eslint-disable */

/**
 * Lower bounds on true discoveries among the `k` smallest p-values, and
 * the automatically selected FWER and FDP sets (1-based ids).
 */
export function bounds(text: string, r: number, backend: string, alpha: number, gamma: number): string;

/**
 * Global test of all scores: mean, critical value, decision and p-value.
 */
export function combine(text: string, r: number, backend: string, alpha: number): string;

/**
 * Critical values of the Gaussian and arbitrary-dependence calibrations
 * for a sweep of exponents at one size.
 */
export function threshold_curve(r_min: number, r_max: number, steps: number, m: number, alpha: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly bounds: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly combine: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly threshold_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
