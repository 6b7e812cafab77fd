/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const arm_demo: (a: number, b: number) => [number, number];
export const iris_demo: (a: number, b: number, c: number) => [number, number];
export const smoothing_demo: (a: number, b: number, c: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
