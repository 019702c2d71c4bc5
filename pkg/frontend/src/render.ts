/** DOM rendering for the list view, package pages, and error states. */

import type { PageDoc } from "./types.js";

const CATEGORY_GLYPHS: Record<string, string> = {
  samplers: "S",
  benchmarks: "B",
  pruners: "P",
  visualization: "V",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function thumbnailFor(doc: PageDoc): HTMLElement {
  const holder = el("div", "card-thumb");
  const category = doc.ref.split("/")[0];
  const placeholder = el("div", "thumb-placeholder", CATEGORY_GLYPHS[category] ?? "?");
  if (doc.thumbnail) {
    const img = el("img");
    img.src = doc.thumbnail;
    img.alt = doc.title;
    img.loading = "lazy";
    img.onerror = () => {
      img.remove();
      holder.appendChild(placeholder);
    };
    holder.appendChild(img);
  } else {
    holder.appendChild(placeholder);
  }
  return holder;
}

export interface ListHandlers {
  onTagClick(tag: string): void;
}

export function renderList(root: HTMLElement, docs: PageDoc[], handlers: ListHandlers): void {
  root.textContent = "";
  if (docs.length === 0) {
    root.appendChild(el("p", "empty-state", "No packages match."));
    return;
  }
  const grid = el("div", "card-grid");
  for (const doc of docs) {
    const card = el("article", "card");
    card.appendChild(thumbnailFor(doc));
    const body = el("div", "card-body");
    const title = el("a", "card-title", doc.title) as HTMLAnchorElement;
    title.href = `#/package/${doc.ref}`;
    body.appendChild(title);
    body.appendChild(el("div", "card-ref", doc.ref));
    body.appendChild(el("p", "card-summary", doc.summary));
    const tags = el("div", "tag-row");
    for (const tag of doc.tags) {
      const chip = el("button", "tag-chip", tag);
      chip.type = "button";
      chip.addEventListener("click", () => handlers.onTagClick(tag));
      tags.appendChild(chip);
    }
    body.appendChild(tags);
    card.appendChild(body);
    grid.appendChild(card);
  }
  root.appendChild(grid);
}

export function renderPackagePage(root: HTMLElement, doc: PageDoc): void {
  root.textContent = "";
  const page = el("div", "package-page");

  const back = el("a", "back-link", "< all packages") as HTMLAnchorElement;
  back.href = "#/";
  page.appendChild(back);

  page.appendChild(el("h1", "package-title", doc.title));
  page.appendChild(el("div", "package-ref", doc.ref));
  page.appendChild(el("p", "package-summary", doc.summary));

  const meta = el("dl", "package-meta");
  const addRow = (label: string, value: string) => {
    meta.appendChild(el("dt", undefined, label));
    meta.appendChild(el("dd", undefined, value));
  };
  addRow("Authors", doc.authors.join(", "));
  addRow("License", doc.license);
  addRow("Tags", doc.tags.join(", ") || "none");
  addRow("Dependencies", doc.dependencies.join(", ") || "none");
  page.appendChild(meta);

  if (doc.example_snippet) {
    const section = el("section", "example-section");
    const header = el("div", "example-header");
    header.appendChild(el("h2", undefined, "Example"));
    const copy = el("button", "copy-button", "Copy");
    copy.type = "button";
    copy.addEventListener("click", () => {
      void navigator.clipboard?.writeText(doc.example_snippet ?? "");
      copy.textContent = "Copied";
      setTimeout(() => (copy.textContent = "Copy"), 1200);
    });
    header.appendChild(copy);
    section.appendChild(header);
    const pre = el("pre", "example-snippet");
    pre.appendChild(el("code", undefined, doc.example_snippet));
    section.appendChild(pre);
    page.appendChild(section);
  }

  const body = el("section", "readme-body");
  // body_html is sanitized once by the catalog builder; rendered verbatim
  body.innerHTML = doc.body_html;
  page.appendChild(body);

  root.appendChild(page);
}

export function renderNotFound(root: HTMLElement, ref: string): void {
  root.textContent = "";
  const panel = el("div", "error-panel");
  panel.appendChild(el("h1", undefined, "Package not found"));
  panel.appendChild(el("p", undefined, `No package page exists for "${ref}".`));
  const back = el("a", "back-link", "< all packages") as HTMLAnchorElement;
  back.href = "#/";
  panel.appendChild(back);
  root.appendChild(panel);
}

export function renderError(root: HTMLElement, message: string): void {
  root.textContent = "";
  const panel = el("div", "error-panel");
  panel.appendChild(el("h1", undefined, "Catalog unavailable"));
  panel.appendChild(el("p", undefined, message));
  root.appendChild(panel);
}

export function renderLoading(root: HTMLElement): void {
  root.textContent = "";
  root.appendChild(el("p", "empty-state", "Loading catalog..."));
}
