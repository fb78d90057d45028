/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const channel_explorer: (a: number, b: number) => [number, number, number, number];
export const compile_random: (a: number, b: number) => [number, number, number, number];
export const squeezing_curve: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
