import { ApiClient } from "./api";
import type { Ctx } from "./context";
import { clear, el } from "./dom";
import { defaultMapAdapter } from "./map";
import { SessionStore } from "./state";
import { renderAdmin } from "./views/admin";
import { renderArticles } from "./views/articles";
import { renderAssistant } from "./views/assistant";
import { renderImpact } from "./views/impact";
import { renderLocator } from "./views/locator";
import { renderLogin } from "./views/login";
import { renderMarket } from "./views/market";
import { renderPickups } from "./views/pickups";
import { renderRewards } from "./views/rewards";

type View = (root: HTMLElement, ctx: Ctx, param?: string) => void;

interface Route {
  view: View;
  label?: string;
  requiresAuth?: boolean;
  roles?: string[];
}

const ROUTES: Record<string, Route> = {
  "#/login": { view: renderLogin },
  "#/locator": { view: renderLocator, label: "Locator" },
  "#/pickups": { view: renderPickups, label: "Pickups", requiresAuth: true, roles: ["citizen"] },
  "#/rewards": { view: renderRewards, label: "Rewards", requiresAuth: true },
  "#/impact": { view: renderImpact, label: "Impact", requiresAuth: true },
  "#/articles": { view: renderArticles, label: "Articles" },
  "#/article": { view: (root, ctx, slug) => renderArticles(root, ctx, slug) },
  "#/market": { view: renderMarket, label: "Marketplace" },
  "#/assistant": { view: renderAssistant, label: "Assistant" },
  "#/admin": { view: renderAdmin, label: "Console", requiresAuth: true,
               roles: ["center_staff", "admin"] },
};

export function createApp(root: HTMLElement, api?: ApiClient, session?: SessionStore): Ctx {
  const client = api ?? new ApiClient((import.meta.env?.VITE_API_BASE as string) ?? "");
  const store = session ?? new SessionStore();
  if (store.current) client.token = store.current.token;

  const ctx: Ctx = {
    api: client,
    session: store,
    map: defaultMapAdapter(),
    navigate: (route: string) => {
      window.location.hash = route;
      render();
    },
  };

  // an expired/revoked token anywhere drops the session and shows login
  client.onUnauthenticated = () => {
    store.set(null);
    client.token = null;
    ctx.navigate("#/login");
  };

  const nav = el("nav", { class: "topbar" });
  const outlet = el("main", { class: "outlet" });
  clear(root).append(nav, outlet);

  function renderNav() {
    clear(nav);
    nav.append(el("span", { class: "brand" }, "Green Grid"));
    const user = store.current?.user;
    for (const [hash, route] of Object.entries(ROUTES)) {
      if (!route.label) continue;
      if (route.requiresAuth && !user) continue;
      if (route.roles && (!user || !route.roles.includes(user.role))) continue;
      nav.append(el("a", { href: hash, class: "nav-link" }, route.label));
    }
    if (user) {
      const logout = el("button", { type: "button", class: "link" }, "log out");
      logout.addEventListener("click", () => {
        store.set(null);
        client.token = null;
        ctx.navigate("#/login");
      });
      nav.append(el("span", { class: "who" }, `${user.display_name} (${user.role})`), logout);
    } else {
      nav.append(el("a", { href: "#/login", class: "nav-link" }, "Log in"));
    }
  }

  function render() {
    renderNav();
    const hash = window.location.hash || "#/locator";
    const [name, param] = splitRoute(hash);
    const route = ROUTES[name] ?? ROUTES["#/locator"];
    if (route.requiresAuth && !store.current) {
      renderLogin(outlet, ctx);
      return;
    }
    route.view(outlet, ctx, param);
  }

  window.addEventListener("hashchange", render);
  render();
  return ctx;
}

function splitRoute(hash: string): [string, string | undefined] {
  const parts = hash.split("/");
  if (parts.length >= 3) {
    return [`${parts[0]}/${parts[1]}`, parts.slice(2).join("/")];
  }
  return [hash, undefined];
}

if (typeof document !== "undefined" && document.getElementById("app") && !import.meta.env?.VITEST) {
  createApp(document.getElementById("app") as HTMLElement);
}
