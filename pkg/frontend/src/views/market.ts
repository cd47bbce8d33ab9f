import { ApiError } from "../api";
import type { Ctx } from "../context";
import { apiNumber, clear, el, errorBox } from "../dom";

/** Display helper: minor currency units -> major-unit string (formatting only). */
export function fmtPrice(minorUnits: number): string {
  return (minorUnits / 100).toFixed(2);
}

export function renderMarket(root: HTMLElement, ctx: Ctx): void {
  clear(root);
  root.append(el("h2", {}, "Eco-Marketplace"));
  const note = el("div");
  const grid = el("div", { class: "product-grid", "data-view": "product-grid" });
  root.append(note, grid);

  void (async () => {
    const [page, balance] = await Promise.all([
      ctx.api.products(),
      ctx.session.current ? ctx.api.balance() : Promise.resolve(null),
    ]);
    if (page.total === 0) {
      grid.append(el("p", { class: "muted" }, "Nothing listed right now."));
      return;
    }
    for (const product of page.items) {
      const quantity = el("input", {
        type: "number", min: "1", max: String(product.stock), value: "1", name: "quantity",
      });
      const maxPoints = balance?.balance ?? 0;
      const points = el("input", {
        type: "range", min: "0", max: String(maxPoints), value: "0", name: "redeem_points",
      });
      const pointsLabel = el("span", { class: "muted" }, "0 points");
      points.addEventListener("input", () => {
        pointsLabel.textContent = `${points.value} points`;
      });
      const outcome = el("div");
      const buy = el("button", { type: "button" }, "Place order");
      buy.addEventListener("click", async () => {
        clear(outcome);
        try {
          const order = await ctx.api.placeOrder(
            [{ product_id: product.id, quantity: Number(quantity.value) }],
            Number(points.value));
          outcome.append(el("p", { class: "success", "data-order-id": order.id },
            "Ordered. Total ",
            apiNumber(order.total_minor_units, {
              formatted: fmtPrice(order.total_minor_units),
              label: "total_minor_units",
            }),
            order.points_discount_minor_units > 0
              ? el("span", {}, " after a discount of ",
                  apiNumber(order.points_discount_minor_units, {
                    formatted: fmtPrice(order.points_discount_minor_units),
                    label: "points_discount_minor_units",
                  }))
              : "",
          ));
        } catch (error) {
          outcome.append(errorBox(error instanceof ApiError
            ? `${error.message} (${error.code})` : String(error)));
        }
      });

      grid.append(el("article", { class: "card product", "data-product-id": product.id },
        el("h3", {}, product.title),
        el("p", { class: "muted" }, `${product.condition.replace("_", " ")} · ${product.category.replace("_", " ")}`),
        el("p", {}, product.description),
        el("p", {}, "Price ",
          apiNumber(product.price_minor_units, {
            formatted: fmtPrice(product.price_minor_units),
            label: "price_minor_units",
          }),
          " · stock ", apiNumber(product.stock, { label: "stock" })),
        ctx.session.current
          ? el("div", { class: "order-controls" },
              el("label", { class: "field" }, el("span", {}, "Quantity"), quantity),
              el("label", { class: "field" }, el("span", {}, "Spend points"), points, pointsLabel),
              buy, outcome)
          : el("p", { class: "muted" }, "Log in to order."),
      ));
    }
  })();
}
