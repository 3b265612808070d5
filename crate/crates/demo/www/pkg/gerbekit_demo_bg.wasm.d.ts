/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const hopf_reduce: (a: number, b: number) => [number, number];
export const lens_cohomology: (a: number, b: number) => [number, number];
export const su2_chi_period: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
