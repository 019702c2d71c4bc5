// @vitest-environment happy-dom
/**
 * DOM rendering: list cards, package detail fields, and error states.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { beforeEach, describe, expect, it } from "vitest";

import { renderError, renderList, renderNotFound, renderPackagePage } from "../src/render.js";
import type { Catalog, PageDoc } from "../src/types.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");
const catalog: Catalog = JSON.parse(readFileSync(join(FIXTURES, "site", "catalog.json"), "utf-8"));

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "<main id='app'></main>";
  root = document.getElementById("app") as HTMLElement;
});

const noopHandlers = { onTagClick: () => undefined };

describe("renderList", () => {
  it("renders one card per package", () => {
    renderList(root, catalog.packages, noopHandlers);
    expect(root.querySelectorAll(".card").length).toBe(catalog.packages.length);
  });

  it("package without thumbnail gets a category placeholder", () => {
    const doc = catalog.packages.find((p) => p.thumbnail === null)!;
    renderList(root, [doc], noopHandlers);
    expect(root.querySelector(".thumb-placeholder")).not.toBeNull();
  });

  it("package with a thumbnail renders an img", () => {
    const doc = catalog.packages.find((p) => p.thumbnail !== null);
    expect(doc).toBeDefined(); // the annealer fixture carries an image
    renderList(root, [doc!], noopHandlers);
    expect(root.querySelector(".card-thumb img")).not.toBeNull();
  });

  it("empty catalog shows the no-packages state", () => {
    renderList(root, [], noopHandlers);
    expect(root.querySelector(".empty-state")?.textContent).toContain("No packages");
  });

  it("cards link to the package route", () => {
    renderList(root, catalog.packages.slice(0, 1), noopHandlers);
    const link = root.querySelector(".card-title") as HTMLAnchorElement;
    expect(link.getAttribute("href")).toBe(`#/package/${catalog.packages[0].ref}`);
  });

  it("tag chips invoke the filter handler", () => {
    const clicked: string[] = [];
    const doc = catalog.packages.find((p) => p.tags.length > 0)!;
    renderList(root, [doc], { onTagClick: (tag) => clicked.push(tag) });
    (root.querySelector(".tag-chip") as HTMLButtonElement).click();
    expect(clicked).toEqual([doc.tags[0]]);
  });
});

describe("renderPackagePage", () => {
  const doc = catalog.packages.find((p) => p.ref === "samplers/tpe")!;

  it("shows every metadata field from the page inventory", () => {
    renderPackagePage(root, doc);
    const text = root.textContent ?? "";
    expect(root.querySelector(".package-title")?.textContent).toBe(doc.title);
    expect(text).toContain(doc.summary);
    for (const author of doc.authors) expect(text).toContain(author);
    expect(text).toContain(doc.license);
    for (const tag of doc.tags) expect(text).toContain(tag);
  });

  it("renders the sanitized README body verbatim (no re-rendering)", () => {
    renderPackagePage(root, doc);
    const body = root.querySelector(".readme-body") as HTMLElement;
    // compare through the same serializer: innerHTML round-trips entity
    // encodings, so inject the expected bytes into a detached node
    const reference = document.createElement("div");
    reference.innerHTML = doc.body_html;
    expect(body.innerHTML).toBe(reference.innerHTML);
  });

  it("shows the example snippet with a copy control", () => {
    expect(doc.example_snippet).toBeTruthy();
    renderPackagePage(root, doc);
    expect(root.querySelector(".example-snippet")?.textContent).toBe(doc.example_snippet);
    expect(root.querySelector(".copy-button")).not.toBeNull();
  });

  it("lists dependencies (or an explicit none)", () => {
    renderPackagePage(root, doc);
    const meta = root.querySelector(".package-meta")?.textContent ?? "";
    expect(meta).toContain("Dependencies");
  });
});

describe("error states", () => {
  it("unknown ref renders the not-found view", () => {
    renderNotFound(root, "samplers/nope");
    expect(root.querySelector(".error-panel")?.textContent).toContain("not found");
    expect(root.textContent).toContain("samplers/nope");
  });

  it("malformed catalog renders a visible error panel, not a blank page", () => {
    renderError(root, "catalog.json is malformed: missing packages array");
    expect(root.querySelector(".error-panel")).not.toBeNull();
    expect(root.textContent).toContain("malformed");
  });
});
