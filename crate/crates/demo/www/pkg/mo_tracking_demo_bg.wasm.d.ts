/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demosession_free: (a: number, b: number) => void;
export const __wbg_demosolution_free: (a: number, b: number) => void;
export const demosession_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const demosession_observations: (a: number) => [number, number];
export const demosession_rpmFront: (a: number, b: number) => [number, number, number, number];
export const demosession_solveRpm: (a: number, b: number, c: number) => [number, number, number];
export const demosession_solveWsm: (a: number, b: number) => [number, number, number];
export const demosession_triangles: (a: number) => [number, number];
export const demosession_wsmFront: (a: number, b: number) => [number, number, number, number];
export const demosolution_control: (a: number) => [number, number];
export const demosolution_converged: (a: number) => number;
export const demosolution_iterations: (a: number) => number;
export const demosolution_j1: (a: number) => number;
export const demosolution_j2: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
