import type { Center, Pickup } from "../api";
import type { Ctx } from "../context";
import { apiNumber, clear, el, errorBox, statusBadge } from "../dom";
import { describe } from "./login";

const CATEGORIES = ["smartphone", "laptop", "television", "battery",
  "large_appliance", "small_appliance", "cable_accessory", "other"];
const CENTER_STATUSES = ["open", "closed", "available", "full"];

/**
 * Staff/admin console. Client-side role gating here is convenience only;
 * every privileged call is re-checked by the server, which returns 403
 * regardless of what this view renders.
 */
export function renderAdmin(root: HTMLElement, ctx: Ctx): void {
  clear(root);
  const role = ctx.session.current?.user.role;
  if (role !== "admin" && role !== "center_staff") {
    root.append(errorBox("This console is for center staff and admins."));
    return;
  }

  root.append(el("h2", {}, "Operations console"));
  const snapshot = el("div", { class: "metric-grid", "data-view": "dashboard" });
  const queue = el("div", { class: "card", "data-view": "pickup-queue" });
  const centersPane = el("div", { class: "card", "data-view": "centers" });
  root.append(snapshot, queue, centersPane);

  let centers: Center[] = [];

  async function refreshSnapshot() {
    clear(snapshot);
    if (role !== "admin") return; // dashboard endpoint is admin-only
    try {
      const data = await ctx.api.dashboard();
      const cells: [string, number][] = [
        ["Users", data.total_users],
        ["Centers", data.total_centers],
        ["Pending pickups", data.pending_pickups],
        ["Collected pickups", data.collected_pickups],
        ["Points issued", data.points_issued],
        ["Points redeemed", data.points_redeemed],
        ["Platform CO₂e (kg)", data.platform_impact.co2e_kg],
      ];
      for (const [title, value] of cells) {
        snapshot.append(el("div", { class: "card metric" },
          el("h3", {}, title),
          el("p", { class: "metric-value" }, apiNumber(value, { label: title }))));
      }
    } catch (error) {
      snapshot.append(errorBox(describe(error)));
    }
  }

  async function refreshQueue() {
    clear(queue);
    queue.append(el("h3", {}, "Pickup decision queue"));
    const [requested, approved] = await Promise.all([
      ctx.api.pickupQueue("requested"),
      ctx.api.pickupQueue("approved"),
    ]);
    if (requested.total === 0 && approved.total === 0) {
      queue.append(el("p", { class: "muted" }, "Queue is empty."));
      return;
    }
    for (const pickup of requested.items) {
      queue.append(requestedRow(pickup));
    }
    for (const pickup of approved.items) {
      queue.append(approvedRow(pickup));
    }
  }

  function requestedRow(pickup: Pickup): HTMLElement {
    const problems = el("span");
    const centerSelect = el("select", { name: "assigned_center" },
      ...centers.map((center) => el("option", { value: center.id }, center.name)));
    const approve = el("button", { type: "button" }, "Approve");
    const reject = el("button", { type: "button", class: "danger" }, "Reject");
    approve.addEventListener("click", async () => {
      clear(problems);
      try {
        await ctx.api.decidePickup(pickup.id, "approve", centerSelect.value);
        await Promise.all([refreshQueue(), refreshSnapshot()]);
      } catch (error) {
        problems.append(errorBox(describe(error)));
      }
    });
    reject.addEventListener("click", async () => {
      clear(problems);
      try {
        await ctx.api.decidePickup(pickup.id, "reject");
        await Promise.all([refreshQueue(), refreshSnapshot()]);
      } catch (error) {
        problems.append(errorBox(describe(error)));
      }
    });
    return el("div", { class: "queue-row", "data-pickup-id": pickup.id },
      statusBadge(pickup.status),
      el("span", {}, `${pickup.category.replace("_", " ")}, est. `,
        apiNumber(pickup.estimated_weight_kg, { suffix: "kg", label: "estimated_weight_kg" })),
      el("span", { class: "muted" }, pickup.address),
      el("span", { class: "muted" },
        `${pickup.preferred_slot.date} ${pickup.preferred_slot.start}-${pickup.preferred_slot.end}`),
      centerSelect, approve, reject, problems);
  }

  function approvedRow(pickup: Pickup): HTMLElement {
    const problems = el("span");
    const weight = el("input", {
      type: "number", step: "any", min: "0", name: "verified_weight",
      placeholder: "verified kg",
    });
    const collect = el("button", { type: "button" }, "Mark collected");
    collect.addEventListener("click", async () => {
      clear(problems);
      try {
        await ctx.api.collectPickup(pickup.id, Number(weight.value));
        await Promise.all([refreshQueue(), refreshSnapshot()]);
      } catch (error) {
        problems.append(errorBox(describe(error)));
      }
    });
    return el("div", { class: "queue-row", "data-pickup-id": pickup.id },
      statusBadge(pickup.status),
      el("span", {}, `${pickup.category.replace("_", " ")}, est. `,
        apiNumber(pickup.estimated_weight_kg, { suffix: "kg", label: "estimated_weight_kg" })),
      weight, collect, problems);
  }

  async function refreshCenters() {
    clear(centersPane);
    centersPane.append(el("h3", {}, "Centers"));
    const response = await ctx.api.centersNearby({ lat: 0, lon: 0, radius_km: 21000 });
    centers = response.items;
    for (const center of centers) {
      const statusSelect = el("select", { name: "status" },
        ...CENTER_STATUSES.map((value) =>
          el("option", { value, selected: value === center.status }, value)));
      statusSelect.addEventListener("change", async () => {
        try {
          await ctx.api.updateCenter(center.id, { status: statusSelect.value });
          await refreshCenters();
        } catch (error) {
          centersPane.prepend(errorBox(describe(error)));
        }
      });
      centersPane.append(el("div", { class: "queue-row", "data-center-id": center.id },
        el("strong", {}, center.name),
        statusBadge(center.status),
        el("span", { class: "muted" }, center.address),
        statusSelect));
    }
    centersPane.append(newCenterForm());
  }

  function newCenterForm(): HTMLElement {
    const name = el("input", { type: "text", name: "name", required: true });
    const address = el("input", { type: "text", name: "address" });
    const lat = el("input", { type: "number", step: "any", name: "lat", required: true });
    const lon = el("input", { type: "number", step: "any", name: "lon", required: true });
    const checkboxes = CATEGORIES.map((value) => {
      const box = el("input", { type: "checkbox", value, name: "categories" });
      return el("label", { class: "field inline" }, box, el("span", {}, value.replace("_", " ")));
    });
    const problems = el("div");
    const form = el("form", { class: "center-form", "data-view": "center-form" },
      el("h4", {}, "Add a center"),
      el("label", { class: "field" }, el("span", {}, "Name"), name),
      el("label", { class: "field" }, el("span", {}, "Address"), address),
      el("label", { class: "field" }, el("span", {}, "Latitude"), lat),
      el("label", { class: "field" }, el("span", {}, "Longitude"), lon),
      el("div", { class: "checkbox-grid" }, ...checkboxes),
      problems,
      el("button", { type: "submit" }, "Create center"),
    );
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      clear(problems);
      const selected = [...form.querySelectorAll<HTMLInputElement>("input[name=categories]:checked")]
        .map((box) => box.value);
      try {
        await ctx.api.createCenter({
          name: name.value,
          address: address.value,
          lat: Number(lat.value),
          lon: Number(lon.value),
          accepted_categories: selected,
        });
        await refreshCenters();
      } catch (error) {
        problems.append(errorBox(describe(error)));
      }
    });
    return form;
  }

  void (async () => {
    await refreshCenters();
    await Promise.all([refreshSnapshot(), refreshQueue()]);
  })();
}
