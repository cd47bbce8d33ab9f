import type { ImpactTotalsDto } from "../api";
import type { Ctx } from "../context";
import { apiNumber, clear, el } from "../dom";

const METRICS: { key: keyof ImpactTotalsDto; title: string; unit: string }[] = [
  { key: "co2e_kg", title: "CO₂e avoided", unit: "kg" },
  { key: "energy_kwh", title: "Energy saved", unit: "kWh" },
  { key: "water_l", title: "Water conserved", unit: "L" },
  { key: "materials_kg", title: "Materials recovered", unit: "kg" },
];

export function renderImpact(root: HTMLElement, ctx: Ctx): void {
  clear(root);
  root.append(el("h2", {}, "Your recycling impact"));
  const cards = el("div", { class: "metric-grid", "data-view": "impact-cards" });
  const chart = el("div", { class: "card", "data-view": "impact-chart" });
  root.append(cards, chart);

  void (async () => {
    const report = await ctx.api.impactMe();

    for (const metric of METRICS) {
      cards.append(el("div", { class: "card metric", "data-metric": metric.key },
        el("h3", {}, metric.title),
        el("p", { class: "metric-value" },
          apiNumber(report[metric.key], {
            suffix: metric.unit,
            formatted: report[metric.key].toFixed(2),
            label: metric.key,
          })),
      ));
    }

    chart.append(el("h3", {}, "CO₂e by category"));
    const categories = Object.entries(report.breakdown);
    if (categories.length === 0) {
      chart.append(el("p", { class: "muted" }, "Nothing recycled yet - book a pickup!"));
      return;
    }
    const largest = Math.max(...categories.map(([, sub]) => sub.co2e_kg), 1e-9);
    for (const [category, sub] of categories) {
      const bar = el("div", { class: "bar" });
      // width is presentation only; the value itself rides in data-value
      bar.style.width = `${Math.max(2, (sub.co2e_kg / largest) * 100)}%`;
      chart.append(el("div", { class: "bar-row", "data-category": category },
        el("span", { class: "bar-label" }, category.replace("_", " ")),
        bar,
        apiNumber(sub.co2e_kg, {
          suffix: "kg",
          formatted: sub.co2e_kg.toFixed(2),
          label: `breakdown.${category}.co2e_kg`,
        }),
      ));
    }
  })();
}
