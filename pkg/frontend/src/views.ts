/**
 * DOM rendering. Everything is built with createElement/textContent so
 * server-provided strings can never be interpreted as markup. Scores are
 * shown rounded but the exact API value is kept on a data attribute.
 */

import { ClusterView, LogPayload, ReviewItemView } from "./api.js";
import { AppState, ClusterEdit, Decision } from "./store.js";

export interface Handlers {
  onTriage(itemId: number, decision: Decision): void;
  onEdit(edit: ClusterEdit): void;
  onApply(): void;
}

function el(
  tag: string,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElement {
  const node = document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    node.setAttribute(name, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

function scoreBadge(score: number): HTMLElement {
  return el("span", { class: "score", "data-score": String(score) }, [score.toFixed(4)]);
}

export function renderHeader(state: AppState): HTMLElement {
  const counts = state.session?.counts;
  const summary = counts
    ? `${counts.clusters} clusters · ${counts.pending_reviews} pending · ` +
      `${counts.outliers} outliers · ${counts.total_rows} rows`
    : "loading…";
  return el("header", { class: "session-bar" }, [
    el("h1", {}, ["simcleaner review"]),
    el("span", { class: "column" }, [state.session?.column ?? ""]),
    el("span", { class: "summary" }, [summary]),
    el("span", { class: "version", "data-role": "version" }, [
      state.loaded ? `v${state.version}` : "…",
    ]),
  ]);
}

export function renderNotice(state: AppState): HTMLElement {
  if (!state.notice) {
    return el("div", { class: "notice hidden", "data-role": "notice" });
  }
  return el("div", { class: "notice", "data-role": "notice", role: "alert" }, [
    state.notice,
  ]);
}

export function renderReviewQueue(items: ReviewItemView[], handlers: Handlers): HTMLElement {
  const section = el("section", { class: "panel review-queue", "data-role": "review" });
  section.append(el("h2", {}, [`Review queue (${items.length})`]));
  if (items.length === 0) {
    section.append(el("p", { class: "empty" }, ["Nothing waiting for review."]));
    return section;
  }
  const list = el("ul", { class: "review-items" });
  for (const item of items) {
    const accept = el(
      "button",
      { "data-action": "accept", "data-id": String(item.id) },
      ["Accept"],
    );
    accept.addEventListener("click", () => handlers.onTriage(item.id, "accept"));
    const reject = el(
      "button",
      { "data-action": "reject", "data-id": String(item.id) },
      ["Reject"],
    );
    reject.addEventListener("click", () => handlers.onTriage(item.id, "reject"));
    list.append(
      el("li", { class: "review-item", "data-id": String(item.id) }, [
        el("span", { class: "candidate" }, [item.candidate]),
        el("span", { class: "arrow" }, ["→"]),
        el("span", { class: "proposed" }, [item.proposed_key]),
        scoreBadge(item.score),
        el("span", { class: "count" }, [`×${item.count}`]),
        accept,
        reject,
      ]),
    );
  }
  section.append(list);
  return section;
}

function variantRow(
  cluster: ClusterView,
  variant: ClusterView["variants"][number],
  allKeys: string[],
  handlers: Handlers,
): HTMLElement {
  const promote = el(
    "button",
    { "data-action": "promote", "data-variant": variant.value },
    ["Make key"],
  );
  promote.addEventListener("click", () =>
    handlers.onEdit({ kind: "rename", old: cluster.key, new: variant.value }),
  );

  const select = el("select", { "data-role": "move-target" }) as HTMLSelectElement;
  for (const key of allKeys) {
    if (key !== cluster.key) {
      select.append(el("option", { value: key }, [key]));
    }
  }
  const move = el("button", { "data-action": "move", "data-variant": variant.value }, [
    "Move",
  ]);
  move.addEventListener("click", () => {
    if (select.value) {
      handlers.onEdit({
        kind: "reassign",
        variant: variant.value,
        from: cluster.key,
        to: select.value,
      });
    }
  });

  const controls: (Node | string)[] = [promote];
  if (allKeys.length > 1) {
    controls.push(select, move);
  }
  return el("li", { class: "variant", "data-value": variant.value }, [
    el("span", { class: "value" }, [variant.value]),
    scoreBadge(variant.score),
    el("span", { class: "count" }, [`×${variant.count}`]),
    ...controls,
  ]);
}

export function renderClusters(clusters: ClusterView[], handlers: Handlers): HTMLElement {
  const section = el("section", { class: "panel clusters", "data-role": "clusters" });
  section.append(el("h2", {}, [`Dictionary (${clusters.length} clusters)`]));
  const allKeys = clusters.map((c) => c.key);
  const list = el("ul", { class: "cluster-list" });
  for (const cluster of clusters) {
    const entry = el("li", { class: "cluster", "data-key": cluster.key }, [
      el("div", { class: "cluster-head" }, [
        el("span", { class: "key" }, [cluster.key]),
        el("span", { class: `status status-${cluster.status}` }, [cluster.status]),
        el("span", { class: "count" }, [`×${cluster.count}`]),
      ]),
    ]);
    if (cluster.variants.length > 0) {
      const variants = el("ul", { class: "variants" });
      for (const variant of cluster.variants) {
        variants.append(variantRow(cluster, variant, allKeys, handlers));
      }
      entry.append(variants);
    }
    list.append(entry);
  }
  section.append(list);
  return section;
}

export function renderApplyPanel(state: AppState, handlers: Handlers): HTMLElement {
  const section = el("section", { class: "panel apply-panel", "data-role": "apply" });
  const pending = state.review.filter((i) => i.resolution === "pending").length;
  const button = el("button", { class: "apply", "data-action": "apply" }, [
    "Apply dictionary",
  ]);
  button.addEventListener("click", () => handlers.onApply());
  section.append(button);
  if (state.applyWarning) {
    const confirm = el("button", { "data-action": "apply-anyway" }, ["Apply anyway"]);
    confirm.addEventListener("click", () => handlers.onApply());
    section.append(
      el("div", { class: "warning", "data-role": "apply-warning" }, [
        `${pending} review item(s) are still pending. `,
        confirm,
      ]),
    );
  }
  return section;
}

export function renderReport(log: LogPayload | null): HTMLElement {
  const section = el("section", { class: "panel report", "data-role": "report" });
  section.append(el("h2", {}, ["Last apply"]));
  if (!log || !log.available || !log.summary) {
    section.append(el("p", { class: "empty" }, ["No apply has run in this session."]));
    return section;
  }
  section.append(
    el("dl", { class: "summary" }, [
      el("dt", {}, ["rows scanned"]),
      el("dd", { "data-role": "rows-scanned" }, [String(log.summary.rows_scanned)]),
      el("dt", {}, ["cells replaced"]),
      el("dd", { "data-role": "cells-replaced" }, [String(log.summary.cells_replaced)]),
      el("dt", {}, ["outliers skipped"]),
      el("dd", { "data-role": "outliers-skipped" }, [String(log.summary.outliers_skipped)]),
    ]),
  );
  if (log.entries && log.entries.length > 0) {
    const table = el("table", { class: "entries" });
    table.append(
      el("tr", {}, [
        el("th", {}, ["row"]),
        el("th", {}, ["old"]),
        el("th", {}, ["new"]),
      ]),
    );
    for (const entry of log.entries) {
      table.append(
        el("tr", {}, [
          el("td", {}, [String(entry.row)]),
          el("td", {}, [entry.old]),
          el("td", {}, [entry.new]),
        ]),
      );
    }
    section.append(
      el("p", { class: "entry-total" }, [
        `${log.entry_total} change(s) total, showing ${log.entries.length}`,
      ]),
      table,
    );
  }
  return section;
}

export function renderApp(state: AppState, handlers: Handlers): HTMLElement {
  const root = el("div", { class: "app" });
  root.append(renderHeader(state), renderNotice(state));
  const main = el("main", { class: "columns" });
  main.append(renderReviewQueue(state.review, handlers), renderClusters(state.clusters, handlers));
  root.append(main, renderApplyPanel(state, handlers), renderReport(state.log));
  return root;
}
