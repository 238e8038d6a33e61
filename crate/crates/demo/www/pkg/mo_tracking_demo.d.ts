/* tslint:disable */
/* eslint-disable */

export class DemoSession {
    free(): void;
    [Symbol.dispose](): void;
    constructor(level: number, falling: boolean, lambda1: number, lambda2: number);
    observations(): Float64Array;
    rpmFront(size: number): Float64Array;
    solveRpm(z1: number, z2: number): DemoSolution;
    solveWsm(alpha1: number): DemoSolution;
    triangles(): Float64Array;
    wsmFront(size: number): Float64Array;
}

export class DemoSolution {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly control: Float64Array;
    readonly converged: boolean;
    readonly iterations: number;
    readonly j1: number;
    readonly j2: number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demosession_free: (a: number, b: number) => void;
    readonly __wbg_demosolution_free: (a: number, b: number) => void;
    readonly demosession_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly demosession_observations: (a: number) => [number, number];
    readonly demosession_rpmFront: (a: number, b: number) => [number, number, number, number];
    readonly demosession_solveRpm: (a: number, b: number, c: number) => [number, number, number];
    readonly demosession_solveWsm: (a: number, b: number) => [number, number, number];
    readonly demosession_triangles: (a: number) => [number, number];
    readonly demosession_wsmFront: (a: number, b: number) => [number, number, number, number];
    readonly demosolution_control: (a: number) => [number, number];
    readonly demosolution_converged: (a: number) => number;
    readonly demosolution_iterations: (a: number) => number;
    readonly demosolution_j1: (a: number) => number;
    readonly demosolution_j2: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
