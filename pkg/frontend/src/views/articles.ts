import type { Ctx } from "../context";
import { clear, el, errorBox } from "../dom";
import { describe } from "./login";

export function renderArticles(root: HTMLElement, ctx: Ctx, slug?: string): void {
  clear(root);
  if (slug) {
    void renderReader(root, ctx, slug);
    return;
  }

  root.append(el("h2", {}, "Insights and awareness hub"));
  const list = el("div", { class: "article-list", "data-view": "article-list" });
  root.append(list);

  void (async () => {
    const page = await ctx.api.articles();
    if (page.total === 0) {
      list.append(el("p", { class: "muted" }, "No articles published yet."));
      return;
    }
    for (const article of page.items) {
      const link = el("a", { href: `#/article/${article.slug}` }, article.title);
      list.append(el("article", { class: "card", "data-slug": article.slug },
        el("h3", {}, link),
        el("p", { class: "muted" }, article.tags.join(" · ")),
      ));
    }
  })();
}

async function renderReader(root: HTMLElement, ctx: Ctx, slug: string): Promise<void> {
  try {
    const article = await ctx.api.article(slug);
    const paragraphs = article.body.split("\n\n").map((text) => el("p", {}, text));
    root.append(
      el("a", { href: "#/articles", class: "muted" }, "← all articles"),
      el("article", { class: "card reader", "data-view": "article-reader" },
        el("h2", {}, article.title),
        el("p", { class: "muted" }, article.tags.join(" · ")),
        ...paragraphs,
      ),
    );
  } catch (error) {
    root.append(errorBox(describe(error)));
  }
}
