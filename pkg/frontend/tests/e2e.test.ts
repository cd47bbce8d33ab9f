/**
 * End-to-end scenario against a real backend process:
 * register -> locate a seeded center -> book a pickup -> staff approves ->
 * staff collects 5 kg -> balance and impact cards update -> redeem a catalog
 * item. Every number the UI displays is compared against the corresponding
 * API field fetched independently.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, expect, test, vi } from "vitest";

import { ApiClient } from "../src/api";
import type { Ctx } from "../src/context";
import { StaticPlotAdapter } from "../src/map";
import { SessionStore } from "../src/state";
import { renderAdmin } from "../src/views/admin";
import { renderImpact } from "../src/views/impact";
import { renderLocator } from "../src/views/locator";
import { renderLogin } from "../src/views/login";
import { renderPickups } from "../src/views/pickups";
import { renderRewards } from "../src/views/rewards";

const PORT = 18200 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;
const ADMIN_EMAIL = "admin@e2e.test";
const ADMIN_PASSWORD = "admin-pass-1";

let server: ChildProcess;

async function waitFor(condition: () => boolean, timeout = 10000): Promise<void> {
  const start = Date.now();
  while (!condition()) {
    if (Date.now() - start > timeout) throw new Error("timeout waiting for condition");
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

function makeCtx(): { ctx: Ctx; api: ApiClient; root: HTMLElement } {
  const api = new ApiClient(BASE);
  const session = new SessionStore(null);
  const root = document.createElement("div");
  document.body.append(root);
  const ctx: Ctx = { api, session, map: new StaticPlotAdapter(), navigate: vi.fn() };
  return { ctx, api, root };
}

function setInput(scope: HTMLElement, name: string, value: string): void {
  const input = scope.querySelector<HTMLInputElement | HTMLSelectElement>(`[name=${name}]`);
  if (!input) throw new Error(`no input named ${name}`);
  input.value = value;
}

function submit(form: HTMLElement): void {
  form.dispatchEvent(new window.Event("submit", { bubbles: true, cancelable: true }));
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "gg-e2e-"));
  const config = join(dir, "gg.yaml");
  writeFileSync(config, [
    `database: {url: sqlite://${dir}/e2e.db}`,
    "auth: {token_key: e2e-test-key, scrypt_log2_n: 12}",
    "",
  ].join("\n"));

  execFileSync("greengrid", ["migrate", "--config", config]);
  execFileSync("greengrid", ["seed", "--config", config]);
  execFileSync("greengrid", ["create-admin", "--config", config,
    "--email", ADMIN_EMAIL, "--password", ADMIN_PASSWORD]);

  server = spawn("greengrid",
    ["serve", "--config", config, "--port", String(PORT)],
    { stdio: "ignore" });

  const probe = new ApiClient(BASE);
  const start = Date.now();
  for (;;) {
    try {
      await probe.healthz();
      break;
    } catch {
      if (Date.now() - start > 30000) throw new Error("backend did not come up");
      await new Promise((resolve) => setTimeout(resolve, 200));
    }
  }
}, 60000);

afterAll(() => {
  server?.kill("SIGTERM");
});

test("citizen journey: register, locate, book, approve, collect, redeem", async () => {
  // -- register through the UI form --
  const citizen = makeCtx();
  renderLogin(citizen.root, citizen.ctx);
  const registerForm = citizen.root.querySelector<HTMLElement>("[data-view=register-form]")!;
  setInput(registerForm, "email", "asha@e2e.test");
  setInput(registerForm, "display_name", "Asha");
  setInput(registerForm, "password", "citizen-pass-1");
  submit(registerForm);
  await waitFor(() => citizen.ctx.session.current !== null);
  expect(citizen.ctx.session.current!.user.role).toBe("citizen");

  // -- locate the seeded center; displayed distance equals the API's --
  renderLocator(citizen.root, citizen.ctx);
  await waitFor(() => citizen.root.querySelector(".center-card") !== null);
  const firstCard = citizen.root.querySelector<HTMLElement>(".center-card")!;
  expect(firstCard.textContent).toContain("Dhule Central E-Dumper");

  const apiNearby = await citizen.api.centersNearby(
    { lat: 20.9042, lon: 74.7749, radius_km: 50 });
  const shownDistance = firstCard.querySelector<HTMLElement>("[data-label=distance_km]")!;
  expect(shownDistance.dataset.value).toBe(String(apiNearby.items[0].distance_km));
  const centerId = firstCard.dataset.centerId!;
  expect(centerId).toBe(apiNearby.items[0].id);

  // -- book a pickup through the form --
  renderPickups(citizen.root, citizen.ctx);
  await waitFor(() => citizen.root.querySelector("[data-view=pickup-form]") !== null);
  const pickupForm = citizen.root.querySelector<HTMLElement>("[data-view=pickup-form]")!;
  setInput(pickupForm, "category", "laptop");
  setInput(pickupForm, "weight", "4");
  setInput(pickupForm, "address", "12 Green Street, Dhule");
  setInput(pickupForm, "date", "2099-01-01");
  submit(pickupForm);
  await waitFor(() => citizen.root.querySelector("[data-pickup-id]") !== null);
  expect(citizen.root.querySelector("[data-pickup-id] .badge")!.textContent).toBe("requested");

  // -- staff account (created by the admin) works the console --
  const adminApi = new ApiClient(BASE);
  const adminLogin = await adminApi.login(ADMIN_EMAIL, ADMIN_PASSWORD);
  adminApi.token = adminLogin.token;
  await adminApi.createUser("staff@e2e.test", "Sam", "staff-pass-1", "center_staff");

  const staff = makeCtx();
  const staffLogin = await staff.api.login("staff@e2e.test", "staff-pass-1");
  staff.api.token = staffLogin.token;
  staff.ctx.session.set({ token: staffLogin.token, user: staffLogin.user });

  renderAdmin(staff.root, staff.ctx);
  await waitFor(() => staff.root.querySelector("[data-view=pickup-queue] [data-pickup-id]") !== null);
  const queueRow = staff.root.querySelector<HTMLElement>(
    "[data-view=pickup-queue] [data-pickup-id]")!;
  const pickupId = queueRow.dataset.pickupId!;

  // approve, assigning the Dhule center
  const centerSelect = queueRow.querySelector<HTMLSelectElement>("select[name=assigned_center]")!;
  centerSelect.value = centerId;
  [...queueRow.querySelectorAll("button")]
    .find((button) => button.textContent === "Approve")!.click();
  await waitFor(() => {
    const row = staff.root.querySelector<HTMLElement>(`[data-pickup-id="${pickupId}"]`);
    return row !== null && row.querySelector("input[name=verified_weight]") !== null;
  });

  // collect with a verified weight of 5 kg
  const approvedRow = staff.root.querySelector<HTMLElement>(`[data-pickup-id="${pickupId}"]`)!;
  approvedRow.querySelector<HTMLInputElement>("input[name=verified_weight]")!.value = "5";
  [...approvedRow.querySelectorAll("button")]
    .find((button) => button.textContent === "Mark collected")!.click();
  await waitFor(() =>
    staff.root.querySelector(`[data-pickup-id="${pickupId}"]`) === null);

  // -- citizen sees the updated balance, straight from the API --
  renderRewards(citizen.root, citizen.ctx);
  await waitFor(() => citizen.root.querySelector("[data-label=balance]") !== null);
  const apiBalance = await citizen.api.balance();
  expect(apiBalance.balance).toBeGreaterThan(0);
  const balanceShown = citizen.root.querySelector<HTMLElement>("[data-label=balance]")!;
  expect(balanceShown.dataset.value).toBe(String(apiBalance.balance));

  // history shows the accrual delta exactly as the ledger reports it
  const apiHistory = await citizen.api.rewardHistory();
  const deltaShown = citizen.root.querySelector<HTMLElement>("[data-label=delta]")!;
  expect(deltaShown.dataset.value).toBe(String(apiHistory.items[0].delta));

  // -- impact cards are nonzero and equal the API report --
  renderImpact(citizen.root, citizen.ctx);
  await waitFor(() => citizen.root.querySelectorAll("[data-view=impact-cards] .metric").length === 4);
  const report = await citizen.api.impactMe();
  for (const key of ["co2e_kg", "energy_kwh", "water_l", "materials_kg"] as const) {
    expect(report[key]).toBeGreaterThan(0);
    const card = citizen.root.querySelector<HTMLElement>(
      `[data-metric=${key}] [data-label=${key}]`)!;
    expect(card.dataset.value).toBe(String(report[key]));
  }

  // -- redeem a catalog item the collected pickup can afford --
  renderRewards(citizen.root, citizen.ctx);
  await waitFor(() => citizen.root.querySelector("[data-view=catalog] [data-item-id]") !== null);
  const items = await citizen.api.rewardItems();
  const affordable = items.items.find((item) => item.points_cost <= apiBalance.balance)!;
  expect(affordable).toBeDefined();

  const itemRow = citizen.root.querySelector<HTMLElement>(
    `[data-item-id="${affordable.id}"]`)!;
  expect(itemRow.querySelector<HTMLElement>("[data-label=points_cost]")!.dataset.value)
    .toBe(String(affordable.points_cost));
  itemRow.querySelector<HTMLButtonElement>("button")!.click();

  await waitFor(() => {
    const shown = citizen.root.querySelector<HTMLElement>("[data-label=balance]");
    return shown !== null && shown.dataset.value === String(apiBalance.balance - affordable.points_cost);
  });
  const finalBalance = await citizen.api.balance();
  expect(citizen.root.querySelector<HTMLElement>("[data-label=balance]")!.dataset.value)
    .toBe(String(finalBalance.balance));

  // stock decremented by one, as reported by the API and shown in the UI
  const itemsAfter = await citizen.api.rewardItems();
  const after = itemsAfter.items.find((item) => item.id === affordable.id)!;
  expect(after.stock).toBe(affordable.stock - 1);
  await waitFor(() => {
    const row = citizen.root.querySelector<HTMLElement>(
      `[data-item-id="${affordable.id}"] [data-label=stock]`);
    return row !== null && row.dataset.value === String(after.stock);
  });
}, 90000);
