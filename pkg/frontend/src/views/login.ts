import { ApiError } from "../api";
import type { Ctx } from "../context";
import { clear, el, errorBox } from "../dom";

export function renderLogin(root: HTMLElement, ctx: Ctx): void {
  clear(root);

  const loginError = el("div");
  const registerError = el("div");

  const loginEmail = el("input", { type: "email", name: "email", required: true });
  const loginPassword = el("input", { type: "password", name: "password", required: true });
  const loginForm = el("form", { class: "card", "data-view": "login-form" },
    el("h2", {}, "Log in"),
    field("Email", loginEmail),
    field("Password", loginPassword),
    loginError,
    el("button", { type: "submit" }, "Log in"),
  );
  loginForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    clear(loginError);
    try {
      const response = await ctx.api.login(loginEmail.value, loginPassword.value);
      ctx.api.token = response.token;
      ctx.session.set({ token: response.token, user: response.user });
      ctx.navigate("#/locator");
    } catch (error) {
      loginError.append(errorBox(describe(error)));
    }
  });

  const regEmail = el("input", { type: "email", name: "email", required: true });
  const regName = el("input", { type: "text", name: "display_name", required: true });
  const regPassword = el("input", { type: "password", name: "password", required: true });
  const registerForm = el("form", { class: "card", "data-view": "register-form" },
    el("h2", {}, "Create an account"),
    field("Email", regEmail),
    field("Display name", regName),
    field("Password (8+ characters)", regPassword),
    registerError,
    el("button", { type: "submit" }, "Register"),
  );
  registerForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    clear(registerError);
    try {
      await ctx.api.register(regEmail.value, regName.value, regPassword.value);
      const response = await ctx.api.login(regEmail.value, regPassword.value);
      ctx.api.token = response.token;
      ctx.session.set({ token: response.token, user: response.user });
      ctx.navigate("#/locator");
    } catch (error) {
      registerError.append(errorBox(describe(error)));
    }
  });

  root.append(el("div", { class: "two-col" }, loginForm, registerForm));
}

function field(label: string, input: HTMLElement): HTMLElement {
  return el("label", { class: "field" }, el("span", {}, label), input);
}

export function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.message} (${error.code})`;
  return error instanceof Error ? error.message : String(error);
}
