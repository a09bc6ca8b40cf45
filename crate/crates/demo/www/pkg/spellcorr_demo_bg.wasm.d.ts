/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_dictionary_free: (a: number, b: number) => void;
export const dictionary_correct: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
export const dictionary_new: (a: number, b: number) => [number, number, number];
export const dictionary_size: (a: number) => number;
export const edit_table: (a: number, b: number, c: number, d: number) => [number, number];
export const swap_variants: (a: number, b: number, c: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
