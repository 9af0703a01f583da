export type EntityType = "PER" | "LOC" | "ORG" | "MISC";

export interface EntityChip {
  word: string;
  type: EntityType;
  probability: number;
}

export interface ChatResponse {
  reply: string;
  intent: string | null;
  entities: EntityChip[];
  fallback: boolean;
}

export interface ModelInfo {
  intent_labels: string[];
  entity_labels: string[];
  vocab_size: number;
  alphabet_size: number;
  thresholds: { intent: number; ner: number };
}

export interface ChatTurn {
  author: "user" | "bot";
  text: string;
  intent?: string | null;
  entities?: EntityChip[];
  fallback?: boolean;
  timestamp: number;
}

/** Error carrying the HTTP status so callers can react to 404 vs 503. */
export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}
