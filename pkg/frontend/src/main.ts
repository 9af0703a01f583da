import { ApiClient } from "./api.js";
import { ChatApp } from "./app.js";

// ?api=http://host:port overrides; same-origin by default
const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? window.location.origin;

const app = new ChatApp(new ApiClient(baseUrl), {
  messages: document.getElementById("messages") as HTMLElement,
  input: document.getElementById("input") as HTMLInputElement,
  send: document.getElementById("send") as HTMLButtonElement,
  banner: document.getElementById("banner") as HTMLElement,
  modelPanel: document.getElementById("model-panel") as HTMLElement,
  refreshModel: document.getElementById("refresh-model") as HTMLButtonElement,
});

void app.start();

// handy for manual poking from the devtools console
(window as unknown as { convobot: ChatApp }).convobot = app;
