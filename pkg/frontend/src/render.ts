import { ChatTurn, EntityChip, ModelInfo } from "./types.js";

// fixed per-type badge colors, also documented in the README
export const ENTITY_COLORS: Record<string, string> = {
  PER: "#7c4dff",
  LOC: "#2e7d32",
  ORG: "#1565c0",
  MISC: "#b26a00",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function entityBadge(chip: EntityChip): HTMLElement {
  const badge = el("span", `badge badge-${chip.type}`, chip.word);
  const type = el("sup", "badge-type", chip.type);
  badge.appendChild(type);
  badge.title = `${chip.type} p=${chip.probability.toFixed(2)}`;
  badge.style.backgroundColor = ENTITY_COLORS[chip.type] ?? "#555";
  return badge;
}

/** Reply text with every occurrence of a recognized entity word badged. */
function highlightedText(text: string, entities: EntityChip[]): DocumentFragment {
  const fragment = document.createDocumentFragment();
  if (entities.length === 0) {
    fragment.appendChild(document.createTextNode(text));
    return fragment;
  }
  const byWord = new Map(entities.map((e) => [e.word.toLowerCase(), e]));
  const pattern = new RegExp(
    "\\b(" +
      [...byWord.keys()]
        .map((w) => w.replace(/[.*+?^${}()|[\]\\]/g, "\\$&"))
        .join("|") +
      ")\\b",
    "gi",
  );
  let cursor = 0;
  for (const match of text.matchAll(pattern)) {
    const at = match.index ?? 0;
    if (at > cursor) fragment.appendChild(document.createTextNode(text.slice(cursor, at)));
    const chip = byWord.get(match[0].toLowerCase());
    if (chip) fragment.appendChild(entityBadge({ ...chip, word: match[0] }));
    cursor = at + match[0].length;
  }
  if (cursor < text.length) fragment.appendChild(document.createTextNode(text.slice(cursor)));
  return fragment;
}

export function renderTurn(turn: ChatTurn): HTMLElement {
  const bubble = el("div", `turn turn-${turn.author}`);
  if (turn.author === "user") {
    bubble.appendChild(el("div", "turn-text", turn.text));
    return bubble;
  }
  if (turn.fallback) bubble.classList.add("turn-fallback");
  const body = el("div", "turn-text");
  body.appendChild(highlightedText(turn.text, turn.entities ?? []));
  bubble.appendChild(body);

  const meta = el("div", "turn-meta");
  meta.appendChild(
    el("span", "intent-label", turn.fallback ? "fallback" : (turn.intent ?? "-")),
  );
  for (const chip of turn.entities ?? []) {
    meta.appendChild(entityBadge(chip));
  }
  bubble.appendChild(meta);
  return bubble;
}

export function renderErrorTurn(message: string): HTMLElement {
  return el("div", "turn turn-error", message);
}

export function renderBanner(message: string, onRetry: () => void): HTMLElement {
  const banner = el("div", "banner");
  banner.appendChild(el("span", "banner-text", message));
  const retry = el("button", "banner-retry", "Retry");
  retry.addEventListener("click", onRetry);
  banner.appendChild(retry);
  return banner;
}

export function renderModelPanel(info: ModelInfo | null): HTMLElement {
  const panel = el("div", "model-panel");
  if (info === null) {
    panel.appendChild(el("div", "model-panel-empty", "models not loaded"));
    return panel;
  }
  const entities = el("div", "model-entities");
  entities.appendChild(el("span", undefined, "entities: "));
  for (const label of info.entity_labels) {
    entities.appendChild(
      entityBadge({ word: label, type: label as EntityChip["type"], probability: 1 }),
    );
  }
  panel.appendChild(entities);
  panel.appendChild(
    el(
      "div",
      "model-sizes",
      `vocabulary ${info.vocab_size} terms, alphabet ${info.alphabet_size} characters`,
    ),
  );
  panel.appendChild(
    el(
      "div",
      "model-thresholds",
      `thresholds: intent ${info.thresholds.intent}, ner ${info.thresholds.ner}`,
    ),
  );
  const intents = el("div", "model-intents", `intents: ${info.intent_labels.join(", ")}`);
  panel.appendChild(intents);
  return panel;
}
