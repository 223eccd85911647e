import type { DesignReport } from "./types.js";

/** Session state for the studio. All transitions return a new object; the
 * report history only ever grows within a session.
 */

export interface CandidateDesign {
  name: string;
  features: number[];
}

export interface HistoryEntry {
  id: number;
  candidate: CandidateDesign;
  report: DesignReport;
}

export interface ViewState {
  selectedGroup: string | null;
  selectedSku: string | null;
  candidate: CandidateDesign;
  history: readonly HistoryEntry[];
}

export function initialState(): ViewState {
  return {
    selectedGroup: null,
    selectedSku: null,
    candidate: { name: "candidate-1", features: [] },
    history: [],
  };
}

function cloneCandidate(candidate: CandidateDesign): CandidateDesign {
  return { name: candidate.name, features: [...candidate.features] };
}

export function setCandidate(state: ViewState, candidate: CandidateDesign): ViewState {
  return { ...state, candidate: cloneCandidate(candidate) };
}

export function selectGroup(state: ViewState, group: string | null): ViewState {
  return { ...state, selectedGroup: group };
}

export function selectSku(state: ViewState, sku: string | null): ViewState {
  return { ...state, selectedSku: sku };
}

/** Record one scored submission. Exactly one entry is appended per call. */
export function appendReport(
  state: ViewState,
  candidate: CandidateDesign,
  report: DesignReport,
): ViewState {
  const entry: HistoryEntry = {
    id: state.history.length + 1,
    candidate: cloneCandidate(candidate),
    report,
  };
  return { ...state, history: Object.freeze([...state.history, entry]) };
}

/** Clone a past submission's candidate into the editor for another round.
 * The history is untouched; the clone gets a derived name so successive
 * iterations are distinguishable.
 */
export function iterateFrom(state: ViewState, entryId: number): ViewState {
  const entry = state.history.find((e) => e.id === entryId);
  if (!entry) {
    return state;
  }
  const candidate = cloneCandidate(entry.candidate);
  candidate.name = `${entry.candidate.name} (rev ${state.history.length + 1})`;
  return { ...state, candidate };
}
