/** Shapes of the static artifacts emitted by `bbohub catalog build`. */

export interface PageDoc {
  ref: string;
  title: string;
  summary: string;
  authors: string[];
  license: string;
  tags: string[];
  body_text: string;
  body_html: string;
  thumbnail: string | null;
  example_snippet: string | null;
  dependencies: string[];
}

export interface Catalog {
  version: number;
  packages: PageDoc[];
}

/** Inverted index: term -> [doc ordinal, weighted term frequency] postings. */
export interface SearchIndexData {
  version: number;
  docs: string[];
  terms: Record<string, [number, number][]>;
  doc_lengths: number[];
  tag_map: Record<string, number[]>;
}
