/* tslint:disable */
/* eslint-disable */

/**
 * A word list held in the page.
 */
export class Dictionary {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `method` is `"edit"` or `"diacritic"`.
     */
    correct(token: string, method: string, max_edit: number, top_k: number): string;
    /**
     * One word per line; `#` lines are skipped.
     */
    constructor(words: string);
    size(): number;
}

/**
 * DP table of the Levenshtein distance between `a` and `b`.
 */
export function edit_table(a: string, b: string): string;

/**
 * Diacritic variants of `token`, listing at most `limit` of them.
 */
export function swap_variants(token: string, limit: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_dictionary_free: (a: number, b: number) => void;
    readonly dictionary_correct: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly dictionary_new: (a: number, b: number) => [number, number, number];
    readonly dictionary_size: (a: number) => number;
    readonly edit_table: (a: number, b: number, c: number, d: number) => [number, number];
    readonly swap_variants: (a: number, b: number, c: number) => [number, number];
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
