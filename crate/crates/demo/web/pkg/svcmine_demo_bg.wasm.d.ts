/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const cd_table: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const mine_synthetic: (a: number, b: bigint, c: number, d: number, e: number) => [number, number, number, number];
export const score_curve: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
