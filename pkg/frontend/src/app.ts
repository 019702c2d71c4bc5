/**
 * Single-page catalog browser.
 *
 * Routes: `#/` (searchable list) and `#/package/<category>/<name>`.
 * All data comes from the two static artifacts plus per-package page files;
 * search runs entirely client-side against the shipped index bytes.
 */

import { renderError, renderList, renderLoading, renderNotFound, renderPackagePage } from "./render.js";
import { normalizeTag, search } from "./search.js";
import type { Catalog, PageDoc, SearchIndexData } from "./types.js";

interface AppState {
  catalog: Catalog;
  index: SearchIndexData;
  query: string;
  activeTags: Set<string>;
  byRef: Map<string, PageDoc>;
}

async function fetchJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new Error(`${url}: HTTP ${response.status}`);
  }
  return (await response.json()) as T;
}

function parseCatalog(raw: unknown): Catalog {
  const catalog = raw as Catalog;
  if (!catalog || !Array.isArray(catalog.packages)) {
    throw new Error("catalog.json is malformed: missing packages array");
  }
  return catalog;
}

function visibleDocs(state: AppState): PageDoc[] {
  const hits = search(state.index, state.query, [...state.activeTags]);
  return hits
    .map((hit) => state.byRef.get(hit.ref))
    .filter((doc): doc is PageDoc => doc !== undefined);
}

function renderTagBar(state: AppState, bar: HTMLElement, rerender: () => void): void {
  bar.textContent = "";
  const allTags = Object.keys(state.index.tag_map).sort();
  for (const tag of allTags) {
    const chip = document.createElement("button");
    chip.type = "button";
    chip.className = state.activeTags.has(tag) ? "tag-chip active" : "tag-chip";
    chip.textContent = tag;
    chip.addEventListener("click", () => {
      if (state.activeTags.has(tag)) {
        state.activeTags.delete(tag);
      } else {
        state.activeTags.add(tag);
      }
      rerender();
    });
    bar.appendChild(chip);
  }
}

function route(): { kind: "list" } | { kind: "package"; ref: string } {
  const hash = window.location.hash;
  const match = hash.match(/^#\/package\/([a-z_]+)\/([a-z0-9_]+)$/);
  if (match) {
    return { kind: "package", ref: `${match[1]}/${match[2]}` };
  }
  return { kind: "list" };
}

export async function start(root: HTMLElement): Promise<void> {
  renderLoading(root);
  let state: AppState;
  try {
    const [catalogRaw, index] = await Promise.all([
      fetchJson<unknown>("catalog.json"),
      fetchJson<SearchIndexData>("search_index.json"),
    ]);
    const catalog = parseCatalog(catalogRaw);
    state = {
      catalog,
      index,
      query: "",
      activeTags: new Set(),
      byRef: new Map(catalog.packages.map((p) => [p.ref, p])),
    };
  } catch (err) {
    renderError(root, err instanceof Error ? err.message : String(err));
    return;
  }

  const controls = document.createElement("div");
  controls.className = "controls";
  const searchBox = document.createElement("input");
  searchBox.type = "search";
  searchBox.placeholder = "Search packages (all terms must match)";
  searchBox.className = "search-box";
  const tagBar = document.createElement("div");
  tagBar.className = "tag-bar";
  const results = document.createElement("div");
  results.className = "results";
  controls.appendChild(searchBox);
  controls.appendChild(tagBar);

  const renderCurrent = async () => {
    const current = route();
    if (current.kind === "list") {
      root.textContent = "";
      root.appendChild(controls);
      root.appendChild(results);
      renderTagBar(state, tagBar, () => void renderCurrent());
      renderList(results, visibleDocs(state), {
        onTagClick: (tag) => {
          state.activeTags.add(normalizeTag(tag));
          void renderCurrent();
        },
      });
      return;
    }
    const cached = state.byRef.get(current.ref);
    try {
      const doc = cached ?? (await fetchJson<PageDoc>(`packages/${current.ref}.json`));
      renderPackagePage(root, doc);
    } catch {
      renderNotFound(root, current.ref);
    }
  };

  searchBox.addEventListener("input", () => {
    state.query = searchBox.value;
    void renderCurrent();
  });
  window.addEventListener("hashchange", () => void renderCurrent());
  await renderCurrent();
}

declare global {
  interface Window {
    bbohubStart?: typeof start;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void start(document.getElementById("app") as HTMLElement);
}
window.bbohubStart = start;
