import { ApiClient } from "./api.js";
import { renderBanner, renderErrorTurn, renderModelPanel, renderTurn } from "./render.js";
import { ApiError, ChatTurn } from "./types.js";

export interface AppElements {
  messages: HTMLElement;
  input: HTMLInputElement | HTMLTextAreaElement;
  send: HTMLButtonElement;
  banner: HTMLElement;
  modelPanel: HTMLElement;
  refreshModel: HTMLButtonElement;
}

/** Page controller: one in-flight request per session, every failure is a
 * visible state, and everything shown comes verbatim from the API. */
export class ChatApp {
  private sessionId: string | null = null;
  private inflight = false;
  readonly turns: ChatTurn[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly ui: AppElements,
  ) {
    ui.send.addEventListener("click", () => void this.send());
    ui.input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") {
        event.preventDefault();
        void this.send();
      }
    });
    ui.input.addEventListener("input", () => this.syncControls());
    ui.refreshModel.addEventListener("click", () => void this.refreshModelPanel());
  }

  get connected(): boolean {
    return this.sessionId !== null;
  }

  async start(): Promise<void> {
    this.ui.banner.replaceChildren();
    try {
      this.sessionId = await this.api.createSession();
    } catch (err) {
      this.sessionId = null;
      this.ui.banner.replaceChildren(
        renderBanner(`not connected: ${(err as Error).message}`, () => void this.start()),
      );
    }
    this.syncControls();
    await this.refreshModelPanel();
  }

  async refreshModelPanel(): Promise<void> {
    try {
      const info = await this.api.modelInfo();
      this.ui.modelPanel.replaceChildren(renderModelPanel(info));
    } catch {
      this.ui.modelPanel.replaceChildren(renderModelPanel(null));
    }
  }

  private syncControls(): void {
    const blocked = !this.connected || this.inflight || this.ui.input.value.trim() === "";
    this.ui.send.disabled = blocked;
    this.ui.input.disabled = !this.connected || this.inflight;
  }

  private append(node: HTMLElement): void {
    this.ui.messages.appendChild(node);
    this.ui.messages.scrollTop = this.ui.messages.scrollHeight;
  }

  async send(): Promise<void> {
    const text = this.ui.input.value.trim();
    if (!this.connected || this.inflight || text === "") return;

    const userTurn: ChatTurn = { author: "user", text, timestamp: Date.now() };
    this.turns.push(userTurn);
    this.append(renderTurn(userTurn));
    this.inflight = true;
    this.syncControls();

    try {
      const body = await this.api.chat(this.sessionId as string, text);
      const botTurn: ChatTurn = {
        author: "bot",
        text: body.reply,
        intent: body.intent,
        entities: body.entities,
        fallback: body.fallback,
        timestamp: Date.now(),
      };
      this.turns.push(botTurn);
      this.append(renderTurn(botTurn));
      this.ui.input.value = "";
    } catch (err) {
      const apiErr = err as ApiError;
      if (apiErr.status === 404) {
        // session expired server-side: reconnect, keep the input for resend
        this.sessionId = null;
        this.append(
          renderErrorTurn("session expired; reconnected - press send to retry"),
        );
        await this.startSessionOnly();
      } else {
        this.append(renderErrorTurn(`error: ${apiErr.message}`));
      }
      // input preserved so the user can retry
    } finally {
      this.inflight = false;
      this.syncControls();
    }
  }

  private async startSessionOnly(): Promise<void> {
    try {
      this.sessionId = await this.api.createSession();
    } catch (err) {
      this.ui.banner.replaceChildren(
        renderBanner(`not connected: ${(err as Error).message}`, () => void this.start()),
      );
    }
  }

  /** Transcript as the service produced it, for export and assertions. */
  transcript(): ChatTurn[] {
    return [...this.turns];
  }
}
