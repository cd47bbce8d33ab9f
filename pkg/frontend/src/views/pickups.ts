import type { Ctx } from "../context";
import { apiNumber, clear, el, errorBox, statusBadge } from "../dom";
import { describe } from "./login";

const CATEGORIES = ["smartphone", "laptop", "television", "battery",
  "large_appliance", "small_appliance", "cable_accessory", "other"];

export function renderPickups(root: HTMLElement, ctx: Ctx): void {
  clear(root);

  const category = el("select", { name: "category" },
    ...CATEGORIES.map((value) => el("option", { value }, value.replace("_", " "))));
  const weight = el("input", { type: "number", step: "any", min: "0", name: "weight", required: true });
  const address = el("input", { type: "text", name: "address", required: true });
  const date = el("input", { type: "date", name: "date", required: true });
  const start = el("input", { type: "time", name: "start", value: "09:00", required: true });
  const end = el("input", { type: "time", name: "end", value: "12:00", required: true });
  const problems = el("div");
  const tracker = el("div", { "data-view": "my-pickups" });

  const form = el("form", { class: "card", "data-view": "pickup-form" },
    el("h2", {}, "Book a doorstep pickup"),
    el("label", { class: "field" }, el("span", {}, "Category"), category),
    el("label", { class: "field" }, el("span", {}, "Estimated weight (kg)"), weight),
    el("label", { class: "field" }, el("span", {}, "Address"), address),
    el("fieldset", { class: "slot" },
      el("legend", {}, "Preferred date and time"),
      el("label", { class: "field" }, el("span", {}, "Date"), date),
      el("label", { class: "field" }, el("span", {}, "From"), start),
      el("label", { class: "field" }, el("span", {}, "Until"), end),
    ),
    problems,
    el("button", { type: "submit" }, "Request pickup"),
  );

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    clear(problems);
    try {
      await ctx.api.createPickup({
        category: category.value,
        estimated_weight_kg: Number(weight.value),
        address: address.value,
        preferred_slot: { date: date.value, start: start.value, end: end.value },
      });
      form.reset();
      start.value = "09:00";
      end.value = "12:00";
      await refreshTracker();
    } catch (error) {
      problems.append(errorBox(describe(error)));
    }
  });

  async function refreshTracker() {
    const page = await ctx.api.myPickups();
    clear(tracker);
    tracker.append(el("h2", {}, "My pickups"));
    if (page.total === 0) {
      tracker.append(el("p", { class: "muted" }, "No pickups yet."));
      return;
    }
    const rows = page.items.map((pickup) => {
      const cancellable = pickup.status === "requested" || pickup.status === "approved";
      const cancel = el("button", { type: "button", class: "link" }, "cancel");
      cancel.addEventListener("click", async () => {
        try {
          await ctx.api.cancelPickup(pickup.id);
          await refreshTracker();
        } catch (error) {
          tracker.prepend(errorBox(describe(error)));
        }
      });
      return el("tr", { "data-pickup-id": pickup.id },
        el("td", {}, pickup.category.replace("_", " ")),
        el("td", {}, apiNumber(pickup.estimated_weight_kg, { suffix: "kg", label: "estimated_weight_kg" })),
        el("td", {}, `${pickup.preferred_slot.date} ${pickup.preferred_slot.start}-${pickup.preferred_slot.end}`),
        el("td", {}, statusBadge(pickup.status)),
        el("td", {}, pickup.verified_weight_kg === null
          ? "-"
          : apiNumber(pickup.verified_weight_kg, { suffix: "kg", label: "verified_weight_kg" })),
        el("td", {}, cancellable ? cancel : ""),
      );
    });
    tracker.append(el("table", { class: "card table" },
      el("thead", {}, el("tr", {},
        el("th", {}, "Category"), el("th", {}, "Est."), el("th", {}, "Slot"),
        el("th", {}, "Status"), el("th", {}, "Verified"), el("th", {}, ""))),
      el("tbody", {}, ...rows),
    ));
  }

  root.append(form, tracker);
  void refreshTracker();
}
