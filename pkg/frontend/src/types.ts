/** Wire types for the case service's native-format JSON bodies. */

export type FlagName =
  | "valid"
  | "truth"
  | "inDoubt"
  | "defeated"
  | "undeveloped"
  | "public"
  | "topLevel"
  | "final"
  | "uninstantiated";

export type FlagMap = Partial<Record<FlagName, boolean>>;

export interface ElementRecord {
  id: string;
  kind: string;
  statement: string;
  flags?: FlagMap;
  published?: string;
  away_target?: { element: string; module: string };
  module?: string;
  metadata?: Record<string, string>;
}

export interface RelationshipRecord {
  id: string;
  subject: string;
  predicate: string;
  object: string;
  valid?: boolean;
  inDoubt?: boolean;
  multiplicity?: { indicator: string; min: number; max?: number; group?: string };
  acp?: string;
  confidence_argument?: string;
}

export interface ContainerRecord {
  id: string;
  kind: string;
  name?: string;
  viewType?: string;
  members?: string[];
  flags?: FlagMap;
  instantiation_data?: string;
  artefact_uri?: string;
}

export interface CaseDocument {
  format_version: string;
  case: ContainerRecord;
  elements: ElementRecord[];
  relationships: RelationshipRecord[];
  containers: ContainerRecord[];
}

export interface Envelope<T> {
  version: number;
  data: T;
}

export interface QueryRow {
  id: string;
  statement: string;
}

export interface InferenceResponse {
  snapshot_version: number;
  converged: boolean;
  iterations: number;
  deltas: { id: string; flag: string; old: unknown; new: unknown; rule: string }[];
  invalidated_relationships: string[];
  diagnostics: { severity: string; rule: string; subjects: string[]; message: string }[];
  overlays: Record<string, string[]>;
}
