import type { ApiClient } from "./api.js";
import { initialState, type ViewState } from "./state.js";

/** Shared session context: one API client, one ViewState holder. Panels
 * read state, compute the next state with the pure helpers, and set it back.
 */
export interface AppContext {
  client: ApiClient;
  getState(): ViewState;
  setState(next: ViewState): void;
}

export function createContext(client: ApiClient): AppContext {
  let state = initialState();
  return {
    client,
    getState: () => state,
    setState: (next: ViewState) => {
      state = next;
    },
  };
}
