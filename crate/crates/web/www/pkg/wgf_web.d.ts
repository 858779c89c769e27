/* tslint:disable */
/* eslint-disable */

/**
 * Total field of a named scene sampled on a grid.
 */
export class FieldImage {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Probe error against the exact mode, or NaN when the scene has none.
     */
    error(): number;
    im(): Float64Array;
    nx(): number;
    nz(): number;
    /**
     * Real parts with z fastest; NaN on masked points.
     */
    re(): Float64Array;
    /**
     * Region id per point, 0 where masked.
     */
    region(): Uint32Array;
    unknowns(): number;
}

export function slabModes(k_co: string, k_cl: string, h: string, pol: string): string;

export function solveField(name: string, window_lambdas: number, alpha: number, ppw: number, z0: number, z1: number, x0: number, x1: number, nz: number, nx: number): FieldImage;

export function windowDemo(a: string, alpha: number, sizes: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_fieldimage_free: (a: number, b: number) => void;
    readonly fieldimage_error: (a: number) => number;
    readonly fieldimage_im: (a: number) => [number, number];
    readonly fieldimage_nx: (a: number) => number;
    readonly fieldimage_nz: (a: number) => number;
    readonly fieldimage_re: (a: number) => [number, number];
    readonly fieldimage_region: (a: number) => [number, number];
    readonly fieldimage_unknowns: (a: number) => number;
    readonly slabModes: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly solveField: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number, k: number) => [number, number, number];
    readonly windowDemo: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __externref_table_alloc: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
