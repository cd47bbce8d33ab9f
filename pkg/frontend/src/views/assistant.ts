import type { Ctx } from "../context";
import { clear, el } from "../dom";

export function renderAssistant(root: HTMLElement, ctx: Ctx): void {
  clear(root);
  root.append(el("h2", {}, "Eco Assistant"));

  const log = el("div", { class: "chat-log", "data-view": "chat-log" });
  const input = el("input", {
    type: "text", name: "utterance",
    placeholder: "e.g. can I recycle my old phone?",
  });
  const form = el("form", { class: "chat-bar", "data-view": "chat-form" },
    input, el("button", { type: "submit" }, "Ask"));

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text) return;
    input.value = "";
    log.append(el("div", { class: "chat chat-user" }, text));
    const reply = await ctx.api.ask(text);
    const bubble = el("div", { class: "chat chat-bot", "data-intent": reply.intent },
      reply.answer_text);
    if (reply.action?.op === "find_nearby") {
      const go = el("a", { href: "#/locator" }, "Open the locator");
      bubble.append(el("p", {}, go));
    }
    log.append(bubble);
    log.scrollTop = log.scrollHeight;
  });

  root.append(el("div", { class: "card chat-panel" }, log, form));
}
