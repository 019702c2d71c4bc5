/**
 * Client-side search over the shipped index bytes.
 *
 * This mirrors the index producer's semantics exactly: lowercase
 * alphanumeric tokenization, conjunctive containment (every query token AND
 * every active tag), TF-IDF cosine ranking with idf = ln((N+1)/(df+1)) + 1,
 * ties broken by ref ascending.
 */

import type { SearchIndexData } from "./types.js";

export function tokenize(text: string): string[] {
  return text.toLowerCase().match(/[a-z0-9]+/g) ?? [];
}

export function normalizeTag(tag: string): string {
  return tag.trim().toLowerCase().replace(/\s+/g, "-");
}

function idf(nDocs: number, df: number): number {
  return Math.log((nDocs + 1) / (df + 1)) + 1.0;
}

function docNorms(index: SearchIndexData): number[] {
  const n = index.docs.length;
  const sums = new Array<number>(n).fill(0);
  for (const postings of Object.values(index.terms)) {
    const w = idf(n, postings.length);
    for (const [ordinal, tf] of postings) {
      const weight = tf * w;
      sums[ordinal] += weight * weight;
    }
  }
  return sums.map(Math.sqrt);
}

export interface SearchHit {
  ref: string;
  score: number;
}

export function search(index: SearchIndexData, query: string, tags: string[] = []): SearchHit[] {
  const n = index.docs.length;
  if (n === 0) return [];

  let candidates = new Set<number>(index.docs.map((_, i) => i));
  for (const tag of tags) {
    const ords = new Set(index.tag_map[normalizeTag(tag)] ?? []);
    candidates = new Set([...candidates].filter((o) => ords.has(o)));
    if (candidates.size === 0) return [];
  }

  const queryTokens = tokenize(query);
  if (queryTokens.length === 0) {
    return [...candidates]
      .sort((a, b) => (index.docs[a] < index.docs[b] ? -1 : 1))
      .map((o) => ({ ref: index.docs[o], score: 0.0 }));
  }

  const tfByToken = new Map<string, Map<number, number>>();
  for (const token of new Set(queryTokens)) {
    const postings = index.terms[token];
    if (!postings) return [];
    tfByToken.set(token, new Map(postings));
    candidates = new Set([...candidates].filter((o) => tfByToken.get(token)!.has(o)));
    if (candidates.size === 0) return [];
  }

  const norms = docNorms(index);
  const queryCounts = new Map<string, number>();
  for (const token of queryTokens) {
    queryCounts.set(token, (queryCounts.get(token) ?? 0) + 1);
  }
  const queryWeights = new Map<string, number>();
  let queryNormSq = 0;
  for (const [token, count] of queryCounts) {
    const w = count * idf(n, index.terms[token].length);
    queryWeights.set(token, w);
    queryNormSq += w * w;
  }
  const queryNorm = Math.sqrt(queryNormSq);

  const hits: SearchHit[] = [];
  for (const ordinal of candidates) {
    let dot = 0;
    for (const [token, qw] of queryWeights) {
      dot += qw * tfByToken.get(token)!.get(ordinal)! * idf(n, index.terms[token].length);
    }
    const denom = queryNorm * norms[ordinal];
    hits.push({ ref: index.docs[ordinal], score: denom > 0 ? dot / denom : 0.0 });
  }
  hits.sort((a, b) => (b.score - a.score) || (a.ref < b.ref ? -1 : 1));
  return hits;
}
