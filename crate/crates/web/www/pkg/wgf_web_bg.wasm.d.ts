/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_fieldimage_free: (a: number, b: number) => void;
export const fieldimage_error: (a: number) => number;
export const fieldimage_im: (a: number) => [number, number];
export const fieldimage_nx: (a: number) => number;
export const fieldimage_nz: (a: number) => number;
export const fieldimage_re: (a: number) => [number, number];
export const fieldimage_region: (a: number) => [number, number];
export const fieldimage_unknowns: (a: number) => number;
export const slabModes: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
export const solveField: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number, k: number) => [number, number, number];
export const windowDemo: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const __externref_table_alloc: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
