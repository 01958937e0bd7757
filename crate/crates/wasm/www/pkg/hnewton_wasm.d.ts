/* tslint:disable */
/* eslint-disable */

/**
 * An RGBA image with the number of zeros drawn into it.
 */
export class Rendered {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    rgba(): Uint8Array;
    /**
     * Zero locations as `[re0, im0, re1, im1, …]`.
     */
    zeros(): Float64Array;
    readonly height: number;
    readonly width: number;
}

/**
 * Basins of attraction on a grid of the given mesh, one pixel per point.
 */
export function basins(spec_json: string, x_min: number, x_max: number, y_min: number, y_max: number, mesh: number, maxit: number, linsys: string, palette_seed: number): Rendered;

/**
 * Newton orbit from `re + i·im` as `[re0, im0, re1, im1, …]`.
 */
export function newton_orbit(spec_json: string, re: number, im: number, maxit: number, linsys: string): Float64Array;

/**
 * Phase plot of the window `[x_min, x_max] × [y_min, y_max]`.
 */
export function phase_plot(spec_json: string, width: number, height: number, x_min: number, x_max: number, y_min: number, y_max: number, show_poles: boolean): Rendered;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_rendered_free: (a: number, b: number) => void;
    readonly basins: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number, k: number) => [number, number, number];
    readonly newton_orbit: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly phase_plot: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly rendered_height: (a: number) => number;
    readonly rendered_rgba: (a: number) => [number, number];
    readonly rendered_width: (a: number) => number;
    readonly rendered_zeros: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
