// Wire types for the lattice-elicit session API. These mirror the server's
// JSON shapes; the server remains the source of truth for all validation.

export type DecisionKind = "single_adaptor" | "multiple_adaptor" | "option";

export interface NodeSummary {
  id: string;
  title: string;
  statement: string;
  type: string;
}

export interface Question {
  node: NodeSummary;
  decision_kind: DecisionKind;
  children: NodeSummary[];
}

export interface Violation {
  kind: string;
  node: string;
  message: string;
}

export interface Progress {
  decisions_answered: number;
  total_discriminants: number;
}

export interface QuestionResponse {
  session_id: string;
  question: Question;
  violations: Violation[];
  attempt: number;
  progress: Progress;
}

export interface CreateSessionResponse {
  session_id: string;
  family_id: string;
  routed: boolean;
  mode: string;
  status: string;
  question?: Question;
}

export interface ChoiceResponse {
  accepted: boolean;
  violations: Violation[];
  next: string;
}

export interface SpecSidecar {
  family_id: string;
  ids: string[];
  provenance: Record<string, string>;
  metrics: Record<string, unknown>;
  violations: Violation[];
  [key: string]: unknown;
}

export interface SpecResponse {
  markdown: string;
  sidecar: SpecSidecar;
}

export interface FamilySummary {
  family_id: string;
  root: string;
  node_count: number;
  discriminants: number;
}
