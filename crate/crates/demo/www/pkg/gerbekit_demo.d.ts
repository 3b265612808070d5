/* tslint:disable */
/* eslint-disable */

/**
 * Reduce the trivial gerbe on `S³` along the Hopf fibration with `λ = r`.
 */
export function hopf_reduce(r: number, level: number): string;

/**
 * `H^degree(L(n, 1); ℤ)` from the simplicial model.
 */
export function lens_cohomology(n: number, degree: number): string;

/**
 * `∫_{SU(2)} χ` at level `k`.
 */
export function su2_chi_period(k: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly hopf_reduce: (a: number, b: number) => [number, number];
    readonly lens_cohomology: (a: number, b: number) => [number, number];
    readonly su2_chi_period: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
