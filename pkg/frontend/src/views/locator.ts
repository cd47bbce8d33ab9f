import { latestGuard } from "../api";
import type { Ctx } from "../context";
import { apiNumber, clear, el, errorBox, statusBadge } from "../dom";

const CATEGORIES = ["", "smartphone", "laptop", "television", "battery",
  "large_appliance", "small_appliance", "cable_accessory", "other"];

// Dhule city center: a sensible default when geolocation is unavailable
const DEFAULT_LAT = "20.9042";
const DEFAULT_LON = "74.7749";

export function renderLocator(root: HTMLElement, ctx: Ctx): void {
  clear(root);

  const lat = el("input", { type: "number", step: "any", value: DEFAULT_LAT, name: "lat" });
  const lon = el("input", { type: "number", step: "any", value: DEFAULT_LON, name: "lon" });
  const radius = el("input", { type: "number", step: "any", value: "50", name: "radius_km" });
  const category = el("select", { name: "category" },
    ...CATEGORIES.map((value) =>
      el("option", { value }, value === "" ? "any category" : value.replace("_", " "))));
  const openOnly = el("input", { type: "checkbox", name: "open_only" });

  const mapPane = el("div", { class: "map-pane" });
  const results = el("div", { class: "center-list", "data-view": "center-list" });
  const problems = el("div");
  const newest = latestGuard();

  async function search() {
    clear(problems);
    const origin = { lat: Number(lat.value), lon: Number(lon.value) };
    try {
      const response = await newest(ctx.api.centersNearby({
        ...origin,
        radius_km: Number(radius.value),
        category: category.value || undefined,
        status: openOnly.checked ? ["open", "available"] : undefined,
      }));
      if (!response) return; // a newer search superseded this one
      clear(results);
      ctx.map.mount(mapPane, response.items.map((center) => ({
        id: center.id,
        lat: center.location.lat,
        lon: center.location.lon,
        label: center.name,
        status: center.status,
      })), origin);
      if (response.items.length === 0) {
        results.append(el("p", { class: "muted" }, "No centers within this radius."));
        return;
      }
      for (const center of response.items) {
        results.append(el("article", { class: "card center-card", "data-center-id": center.id },
          el("h3", {}, center.name, " ", statusBadge(center.status)),
          el("p", { class: "muted" }, center.address),
          el("p", {},
            "Distance: ",
            apiNumber(center.distance_km ?? 0, {
              suffix: "km",
              formatted: (center.distance_km ?? 0).toFixed(2),
              label: "distance_km",
            })),
          el("p", { class: "muted" }, "Accepts: ",
            center.accepted_categories.map((c) => c.replace("_", " ")).join(", ")),
          center.contact ? el("p", { class: "muted" }, "Contact: ", center.contact) : null,
        ));
      }
    } catch (error) {
      problems.append(errorBox(error instanceof Error ? error.message : String(error)));
    }
  }

  const form = el("form", { class: "card filter-bar", "data-view": "locator-form" },
    el("label", { class: "field" }, el("span", {}, "Latitude"), lat),
    el("label", { class: "field" }, el("span", {}, "Longitude"), lon),
    el("label", { class: "field" }, el("span", {}, "Radius (km)"), radius),
    el("label", { class: "field" }, el("span", {}, "Category"), category),
    el("label", { class: "field inline" }, openOnly, el("span", {}, "open or available only")),
    el("button", { type: "submit" }, "Search"),
  );
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void search();
  });
  category.addEventListener("change", () => void search());
  openOnly.addEventListener("change", () => void search());

  root.append(
    el("h2", {}, "Find an E-Dumper center"),
    form,
    problems,
    el("div", { class: "two-col" }, mapPane, results),
  );
  void search();
}
