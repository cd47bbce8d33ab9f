import { ApiError } from "../api";
import type { Ctx } from "../context";
import { apiNumber, clear, el, errorBox } from "../dom";

export function renderRewards(root: HTMLElement, ctx: Ctx): void {
  clear(root);

  const balancePane = el("div", { class: "card metric", "data-view": "balance" });
  const catalog = el("div", { class: "card", "data-view": "catalog" });
  const history = el("div", { class: "card", "data-view": "history" });

  async function refresh() {
    const [balance, items, entries] = await Promise.all([
      ctx.api.balance(),
      ctx.api.rewardItems(),
      ctx.api.rewardHistory(),
    ]);

    clear(balancePane);
    balancePane.append(
      el("h2", {}, "Green Points balance"),
      el("p", { class: "metric-value" },
        apiNumber(balance.balance, { label: "balance" }), " points"),
    );

    clear(catalog);
    catalog.append(el("h2", {}, "Reward catalog"));
    for (const item of items.items) {
      const note = el("span");
      const redeem = el("button", { type: "button" }, "Redeem");
      redeem.addEventListener("click", async () => {
        clear(note);
        try {
          await ctx.api.redeem(item.id);
          await refresh();
        } catch (error) {
          // surfaced inline from the envelope code (e.g. insufficient_balance)
          if (error instanceof ApiError) {
            note.append(errorBox(`${error.message} (${error.code})`));
          } else {
            note.append(errorBox(String(error)));
          }
        }
      });
      catalog.append(el("div", { class: "catalog-row", "data-item-id": item.id },
        el("strong", {}, item.name),
        el("span", {}, apiNumber(item.points_cost, { label: "points_cost" }), " pts"),
        el("span", { class: "muted" }, "stock ",
          apiNumber(item.stock, { label: "stock" })),
        redeem,
        note,
      ));
    }

    clear(history);
    history.append(el("h2", {}, "History"));
    if (entries.total === 0) {
      history.append(el("p", { class: "muted" }, "No points movements yet."));
    } else {
      history.append(el("table", { class: "table" },
        el("thead", {}, el("tr", {},
          el("th", {}, "When"), el("th", {}, "Kind"), el("th", {}, "Points"))),
        el("tbody", {}, ...entries.items.map((entry) =>
          el("tr", { "data-entry-id": entry.id },
            el("td", {}, new Date(entry.created_at).toLocaleString()),
            el("td", {}, entry.kind.replace("_", " ")),
            el("td", { class: entry.delta > 0 ? "gain" : "spend" },
              apiNumber(entry.delta, { label: "delta" })),
          ))),
      ));
    }
  }

  root.append(balancePane, catalog, history);
  void refresh();
}
